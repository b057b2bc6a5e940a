#include "jobalign/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <unordered_map>

#include <json.hpp>

#include "jobalign/errors.hpp"
#include "jobalign/rng.hpp"

namespace jobalign {

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (temperature <= 0.0) throw ConfigError("temperature must be > 0");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be > 0");
}

std::string TrainReport::to_json() const {
  nlohmann::ordered_json j;
  j["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : epochs) {
    j["epochs"].push_back({{"epoch", e.epoch},
                           {"mean_loss", e.mean_loss},
                           {"mean_grad_norm", e.mean_grad_norm},
                           {"max_grad_norm", e.max_grad_norm},
                           {"batches", e.batches}});
  }
  j["wall_seconds"] = wall_seconds;
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(params_checksum));
  j["params_checksum"] = buf;
  return j.dump(2);
}

InfoNceResult info_nce_loss(const Mat& titles, const Mat& skills,
                            double temperature, bool symmetric) {
  if (temperature <= 0.0) throw ConfigError("temperature must be > 0");
  if (titles.rows != skills.rows || titles.cols != skills.cols) {
    throw ValidationError("title/skill batches have different shapes");
  }
  const std::size_t b = titles.rows;
  if (b < 2) throw ValidationError("InfoNCE needs a batch of at least 2 pairs");
  const std::size_t dim = titles.cols;

  Mat sim(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      sim.at(i, j) = vec_dot(titles.row(i), skills.row(j)) / temperature;
    }
  }

  InfoNceResult result;
  result.d_titles = Mat(b, dim);
  result.d_skills = Mat(b, dim);

  // Titles as queries: softmax over skills within each row.
  Mat prob(b, b);
  double loss = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double m = sim.at(i, 0);
    for (std::size_t j = 1; j < b; ++j) m = std::max(m, sim.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < b; ++j) z += std::exp(sim.at(i, j) - m);
    const double lse = m + std::log(z);
    loss += lse - sim.at(i, i);
    for (std::size_t j = 0; j < b; ++j) {
      prob.at(i, j) = std::exp(sim.at(i, j) - lse);
    }
  }
  loss /= static_cast<double>(b);

  const double direction_weight = symmetric ? 0.5 : 1.0;
  const double scale =
      direction_weight / (static_cast<double>(b) * temperature);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double w = (prob.at(i, j) - (i == j ? 1.0 : 0.0)) * scale;
      vec_axpy(result.d_titles.row(i), w, skills.row(j));
      vec_axpy(result.d_skills.row(j), w, titles.row(i));
    }
  }

  if (symmetric) {
    // Skills as queries: softmax over titles within each column.
    Mat prob2(b, b);
    double loss2 = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
      double m = sim.at(0, j);
      for (std::size_t i = 1; i < b; ++i) m = std::max(m, sim.at(i, j));
      double z = 0.0;
      for (std::size_t i = 0; i < b; ++i) z += std::exp(sim.at(i, j) - m);
      const double lse = m + std::log(z);
      loss2 += lse - sim.at(j, j);
      for (std::size_t i = 0; i < b; ++i) {
        prob2.at(i, j) = std::exp(sim.at(i, j) - lse);
      }
    }
    loss2 /= static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        const double w = (prob2.at(i, j) - (i == j ? 1.0 : 0.0)) * scale;
        vec_axpy(result.d_titles.row(i), w, skills.row(j));
        vec_axpy(result.d_skills.row(j), w, titles.row(i));
      }
    }
    loss = 0.5 * (loss + loss2);
  }
  result.loss = loss;
  return result;
}

namespace {

// Backward step of y = x / ||x||: given g = dL/dy, the unit vector y and
// ||x||, writes dL/dx = (g - (g.y) y) / ||x|| into out.
void normalize_backward(std::span<const double> g, std::span<const double> y,
                        double norm, std::span<double> out) {
  const double gy = vec_dot(g, y);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (g[k] - gy * y[k]) / norm;
  }
}

struct TokenCache {
  explicit TokenCache(const EncoderConfig& cfg) : config(cfg) {}
  EncoderConfig config;
  std::unordered_map<std::string, std::vector<std::uint32_t>> buckets;

  const std::vector<std::uint32_t>& get(const std::string& text) {
    auto it = buckets.find(text);
    if (it == buckets.end()) {
      try {
        it = buckets.emplace(text, token_buckets(config, text)).first;
      } catch (const EmptyInputError&) {
        throw EmptyInputError("text yields no tokens: \"" + text + "\"");
      }
    }
    return it->second;
  }
};

// One forward (and optionally backward) pass over a batch. Gradients, when
// requested, are accumulated in a fixed order: title paths in item order,
// then unique skill labels in first-encounter order.
double batch_pass(const ModelParams& params, const Batch& batch,
                  double temperature, bool symmetric, TokenCache& cache,
                  BatchGradients* grads) {
  const std::size_t b = batch.items.size();
  if (b < 2) throw ValidationError("batch must contain at least 2 items");
  const std::size_t d = params.config.embed_dim;
  const std::size_t p = params.config.projection_dim();
  if (p != d) {
    throw ConfigError(
        "projected titles and encoder-space skill sets have different "
        "dimensions (proj_dim != embed_dim); the contrastive objective "
        "needs a shared similarity space");
  }

  // Unique skill labels across the batch, in sorted order.
  std::map<std::string, std::size_t> label_index;
  std::vector<std::vector<std::size_t>> item_labels(b);
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<std::string> unique = batch.items[i].skill_labels;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    if (unique.empty()) {
      throw EmptyInputError("batch item " + std::to_string(i) +
                            " has no skill labels");
    }
    for (const std::string& label : unique) {
      auto [it, inserted] = label_index.try_emplace(label, label_index.size());
      item_labels[i].push_back(it->second);
    }
  }
  const std::size_t n_labels = label_index.size();
  std::vector<const std::string*> label_text(n_labels);
  for (const auto& [text, idx] : label_index) label_text[idx] = &text;

  // Title pathway: mean rows -> normalize -> project -> normalize.
  std::vector<const std::vector<std::uint32_t>*> title_buckets(b);
  Mat title_unit(b, d);   // u_i
  Mat title_vec(b, p);    // t_i
  std::vector<double> title_mean_norm(b), title_proj_norm(b);
  for (std::size_t i = 0; i < b; ++i) {
    title_buckets[i] = &cache.get(batch.items[i].title);
    mean_of_rows(params.embeddings, *title_buckets[i], title_unit.row(i));
    title_mean_norm[i] = normalize_vector(title_unit.row(i));
    mat_vec(params.projection, title_unit.row(i), title_vec.row(i));
    title_proj_norm[i] = normalize_vector(title_vec.row(i));
  }

  // Per-label embeddings, shared across items.
  std::vector<const std::vector<std::uint32_t>*> label_buckets(n_labels);
  Mat label_unit(n_labels, d);  // v_l
  std::vector<double> label_mean_norm(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) {
    label_buckets[l] = &cache.get(*label_text[l]);
    mean_of_rows(params.embeddings, *label_buckets[l], label_unit.row(l));
    label_mean_norm[l] = normalize_vector(label_unit.row(l));
  }

  // Skill-set pathway: mean of label units -> normalize.
  Mat skill_vec(b, d);  // s_i
  std::vector<double> skill_mean_norm(b);
  for (std::size_t i = 0; i < b; ++i) {
    auto row = skill_vec.row(i);
    for (std::size_t l : item_labels[i]) vec_axpy(row, 1.0, label_unit.row(l));
    vec_scale(row, 1.0 / static_cast<double>(item_labels[i].size()));
    skill_mean_norm[i] = normalize_vector(row);
  }

  InfoNceResult nce = info_nce_loss(title_vec, skill_vec, temperature, symmetric);
  if (grads == nullptr) return nce.loss;

  grads->loss = nce.loss;
  if (grads->d_embeddings.rows != params.embeddings.rows ||
      grads->d_embeddings.cols != params.embeddings.cols) {
    grads->d_embeddings = Mat(params.embeddings.rows, params.embeddings.cols);
    grads->d_projection = Mat(params.projection.rows, params.projection.cols);
  } else {
    grads->d_embeddings.fill(0.0);
    grads->d_projection.fill(0.0);
  }

  std::vector<double> g_proj(p), g_unit(d), g_mean(d);
  Mat label_grad(n_labels, d);  // dL/dv_l accumulated over items
  for (std::size_t i = 0; i < b; ++i) {
    // Title side.
    normalize_backward(nce.d_titles.row(i), title_vec.row(i),
                       title_proj_norm[i], g_proj);
    for (std::size_t r = 0; r < p; ++r) {
      vec_axpy(grads->d_projection.row(r), g_proj[r], title_unit.row(i));
    }
    mat_t_vec(params.projection, g_proj, g_unit);
    normalize_backward(g_unit, title_unit.row(i), title_mean_norm[i], g_mean);
    const auto& tb = *title_buckets[i];
    const double tscale = 1.0 / static_cast<double>(tb.size());
    for (std::uint32_t bucket : tb) {
      vec_axpy(grads->d_embeddings.row(bucket), tscale,
               std::span<const double>(g_mean));
    }

    // Skill side: push through the set normalization, fan out to labels.
    normalize_backward(nce.d_skills.row(i), skill_vec.row(i),
                       skill_mean_norm[i], g_mean);
    const double lscale = 1.0 / static_cast<double>(item_labels[i].size());
    for (std::size_t l : item_labels[i]) {
      vec_axpy(label_grad.row(l), lscale, std::span<const double>(g_mean));
    }
  }
  for (std::size_t l = 0; l < n_labels; ++l) {
    normalize_backward(label_grad.row(l), label_unit.row(l),
                       label_mean_norm[l], g_mean);
    const auto& lb = *label_buckets[l];
    const double scale = 1.0 / static_cast<double>(lb.size());
    for (std::uint32_t bucket : lb) {
      vec_axpy(grads->d_embeddings.row(bucket), scale,
               std::span<const double>(g_mean));
    }
  }
  return nce.loss;
}

struct AdamState {
  Mat m_embeddings, v_embeddings, m_projection, v_projection;
  std::size_t step = 0;

  explicit AdamState(const ModelParams& params)
      : m_embeddings(params.embeddings.rows, params.embeddings.cols),
        v_embeddings(params.embeddings.rows, params.embeddings.cols),
        m_projection(params.projection.rows, params.projection.cols),
        v_projection(params.projection.rows, params.projection.cols) {}
};

void adam_update(std::vector<double>& theta, std::vector<double>& m,
                 std::vector<double>& v, const std::vector<double>& g,
                 const TrainConfig& cfg, double bias1, double bias2) {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    m[k] = cfg.adam_beta1 * m[k] + (1.0 - cfg.adam_beta1) * g[k];
    v[k] = cfg.adam_beta2 * v[k] + (1.0 - cfg.adam_beta2) * g[k] * g[k];
    const double mhat = m[k] / bias1;
    const double vhat = v[k] / bias2;
    theta[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
  }
}

double gradient_norm(const BatchGradients& grads) {
  double s = 0.0;
  for (double g : grads.d_embeddings.data) s += g * g;
  for (double g : grads.d_projection.data) s += g * g;
  return std::sqrt(s);
}

}  // namespace

BatchGradients batch_gradients(const ModelParams& params, const Batch& batch,
                               double temperature, bool symmetric) {
  TokenCache cache(params.config);
  BatchGradients grads;
  batch_pass(params, batch, temperature, symmetric, cache, &grads);
  return grads;
}

double grad_check(const ModelParams& params, const Batch& batch,
                  double temperature, double h) {
  const BatchGradients analytic = batch_gradients(params, batch, temperature);
  ModelParams probe = params;
  TokenCache cache(params.config);
  double max_rel = 0.0;

  auto sweep = [&](Mat& m, const Mat& analytic_grad) {
    for (std::size_t k = 0; k < m.data.size(); ++k) {
      const double orig = m.data[k];
      m.data[k] = orig + h;
      const double up = batch_pass(probe, batch, temperature, false, cache, nullptr);
      m.data[k] = orig - h;
      const double down = batch_pass(probe, batch, temperature, false, cache, nullptr);
      m.data[k] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double exact = analytic_grad.data[k];
      const double denom = std::max(std::abs(numeric), std::abs(exact));
      if (denom >= 1e-6) {
        max_rel = std::max(max_rel, std::abs(numeric - exact) / denom);
      }
    }
  };
  sweep(probe.embeddings, analytic.d_embeddings);
  sweep(probe.projection, analytic.d_projection);
  return max_rel;
}

TrainResult train(const std::vector<JobAdRecord>& dataset,
                  const EncoderConfig& encoder_config, const TrainConfig& config,
                  const std::string& checkpoint_dir) {
  encoder_config.validate();
  config.validate();
  if (dataset.empty()) throw ConfigError("training dataset is empty");

  const auto start = std::chrono::steady_clock::now();
  ModelParams params = ModelParams::init(
      encoder_config, derive_stream(config.seed, kParamsInitStream));
  TokenCache cache(encoder_config);
  std::optional<AdamState> adam;
  if (config.optimizer == TrainConfig::Optimizer::adam) adam.emplace(params);
  BatchGradients grads;
  TrainReport report;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<Batch> batches =
        make_batches(dataset, config.batch_size, config.seed, epoch);
    TrainReport::EpochStats stats;
    stats.epoch = epoch;
    stats.batches = batches.size();
    double loss_sum = 0.0;
    double gnorm_sum = 0.0;
    for (const Batch& batch : batches) {
      batch_pass(params, batch, config.temperature, config.symmetric, cache,
                 &grads);
      if (!std::isfinite(grads.loss)) {
        throw NumericError("epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch.index) +
                           ": non-finite loss " + std::to_string(grads.loss));
      }
      const double gnorm = gradient_norm(grads);
      if (!std::isfinite(gnorm)) {
        throw NumericError("epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch.index) +
                           ": non-finite gradient norm");
      }
      if (adam) {
        adam->step += 1;
        const double bias1 =
            1.0 - std::pow(config.adam_beta1, static_cast<double>(adam->step));
        const double bias2 =
            1.0 - std::pow(config.adam_beta2, static_cast<double>(adam->step));
        adam_update(params.embeddings.data, adam->m_embeddings.data,
                    adam->v_embeddings.data, grads.d_embeddings.data, config,
                    bias1, bias2);
        adam_update(params.projection.data, adam->m_projection.data,
                    adam->v_projection.data, grads.d_projection.data, config,
                    bias1, bias2);
      } else {
        for (std::size_t k = 0; k < params.embeddings.data.size(); ++k) {
          params.embeddings.data[k] -=
              config.learning_rate * grads.d_embeddings.data[k];
        }
        for (std::size_t k = 0; k < params.projection.data.size(); ++k) {
          params.projection.data[k] -=
              config.learning_rate * grads.d_projection.data[k];
        }
      }
      params.check_finite();
      loss_sum += grads.loss;
      gnorm_sum += gnorm;
      stats.max_grad_norm = std::max(stats.max_grad_norm, gnorm);
    }
    if (!batches.empty()) {
      stats.mean_loss = loss_sum / static_cast<double>(batches.size());
      stats.mean_grad_norm = gnorm_sum / static_cast<double>(batches.size());
    }
    report.epochs.push_back(stats);
    if (config.checkpoint_every_epoch && !checkpoint_dir.empty()) {
      save_checkpoint(
          checkpoint_dir + "/epoch-" + std::to_string(epoch) + ".jaln", params);
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  report.params_checksum = params.checksum();
  return {std::move(params), std::move(report)};
}

}  // namespace jobalign

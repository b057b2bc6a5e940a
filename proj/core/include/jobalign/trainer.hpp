#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jobalign/corpus.hpp"
#include "jobalign/encoder.hpp"
#include "jobalign/matrix.hpp"

namespace jobalign {

struct TrainConfig {
  std::size_t batch_size = 64;
  double temperature = 0.05;
  double learning_rate = 1e-3;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  enum class Optimizer { sgd, adam } optimizer = Optimizer::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Adds the skills-as-queries direction and averages both. Off by default;
  // the plain objective treats titles as queries over in-batch skill sets.
  bool symmetric = false;
  bool checkpoint_every_epoch = false;

  void validate() const;
};

struct TrainReport {
  struct EpochStats {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double mean_grad_norm = 0.0;
    double max_grad_norm = 0.0;
    std::size_t batches = 0;
  };
  std::vector<EpochStats> epochs;
  double wall_seconds = 0.0;
  std::uint64_t params_checksum = 0;

  std::string to_json() const;
};

struct InfoNceResult {
  double loss = 0.0;
  Mat d_titles;  // dloss/dt_i, one row per pair
  Mat d_skills;  // dloss/ds_j
};

// InfoNCE over B (title, skill-set) pairs with in-batch negatives:
//
//   loss = -(1/B) sum_i log( exp(t_i.s_i / tau) / sum_j exp(t_i.s_j / tau) )
//
// Rows must be unit vectors of equal dimension. The log-sum-exp is
// max-subtracted. Returned gradients are the exact derivatives with respect
// to the rows of `titles` and `skills` treated as free variables.
InfoNceResult info_nce_loss(const Mat& titles, const Mat& skills,
                            double temperature, bool symmetric = false);

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

// Full contrastive training loop: batches from make_batches, title pathway
// embed_text -> project_title, skill pathway embed_skill_set, analytic
// backpropagation through normalization, projection, pooling and embedding
// lookups, then an SGD or Adam step. Deterministic given (dataset, configs,
// seed). Throws NumericError with the batch index on a non-finite loss.
// When checkpoint_dir is nonempty and checkpoint_every_epoch is set, writes
// epoch-<k>.jaln checkpoints there.
TrainResult train(const std::vector<JobAdRecord>& dataset,
                  const EncoderConfig& encoder_config, const TrainConfig& config,
                  const std::string& checkpoint_dir = "");

// Batch gradients of the loss with respect to every entry of E and W,
// computed by the same backward pass train() uses. Exposed for the
// finite-difference harness.
struct BatchGradients {
  double loss = 0.0;
  Mat d_embeddings;  // H x d
  Mat d_projection;  // p x d
};
BatchGradients batch_gradients(const ModelParams& params, const Batch& batch,
                               double temperature, bool symmetric = false);

// Central-difference check of batch_gradients over every parameter.
// Returns the max relative error; entries where both sides are < 1e-6 in
// magnitude count as matching (finite-difference noise floor). Meant for
// small configs (H <= 64, d <= 8, batch <= 8) where the full sweep is cheap.
double grad_check(const ModelParams& params, const Batch& batch,
                  double temperature, double h);

}  // namespace jobalign

#include "jobalign/encoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "jobalign/errors.hpp"
#include "jobalign/rng.hpp"
#include "jobalign/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint i/o assumes a little-endian host");

namespace jobalign {

void EncoderConfig::validate() const {
  if (hash_buckets < 2) throw ConfigError("hash_buckets must be >= 2");
  if (embed_dim < 2) throw ConfigError("embed_dim must be >= 2");
  if (projection_dim() < 2) throw ConfigError("proj_dim must be >= 2");
  if (ngram_min < 1) throw ConfigError("ngram_min must be >= 1");
  if (ngram_min > ngram_max) throw ConfigError("ngram_min must be <= ngram_max");
}

ModelParams ModelParams::init(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams params;
  params.config = config;
  const std::size_t h = config.hash_buckets;
  const std::size_t d = config.embed_dim;
  const std::size_t p = config.projection_dim();
  params.embeddings = Mat(h, d);
  params.projection = Mat(p, d);

  SplitMix64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& x : params.embeddings.data) {
    x = (2.0 * rng.next_unit() - 1.0) * scale;
  }
  if (p == d) {
    for (std::size_t i = 0; i < p; ++i) params.projection.at(i, i) = 1.0;
  } else {
    for (double& x : params.projection.data) {
      x = (2.0 * rng.next_unit() - 1.0) * scale;
    }
  }
  return params;
}

std::uint64_t ModelParams::checksum() const {
  std::uint64_t h = kFnvOffsetBasis;
  auto fold = [&h](const std::vector<double>& values) {
    for (double v : values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      for (int shift = 0; shift < 64; shift += 8) {
        h ^= (bits >> shift) & 0xffu;
        h *= kFnvPrime;
      }
    }
  };
  fold(embeddings.data);
  fold(projection.data);
  return h;
}

void ModelParams::check_finite() const {
  for (double v : embeddings.data) {
    if (!std::isfinite(v)) throw NumericError("non-finite embedding entry");
  }
  for (double v : projection.data) {
    if (!std::isfinite(v)) throw NumericError("non-finite projection entry");
  }
}

std::string_view space_name(Space space) {
  return space == Space::encoder ? "encoder" : "projected";
}

namespace {

void append_ngrams(const std::u32string& scalars, std::uint32_t nmin,
                   std::uint32_t nmax, std::vector<std::string>& out) {
  for (std::uint32_t n = nmin; n <= nmax; ++n) {
    if (scalars.size() < n) break;
    for (std::size_t i = 0; i + n <= scalars.size(); ++i) {
      out.push_back(encode_utf8(std::u32string_view(scalars).substr(i, n)));
    }
  }
}

}  // namespace

std::vector<std::string> tokenize(const EncoderConfig& config,
                                  std::string_view text) {
  config.validate();
  const std::string canon = to_lower(normalize_text(text));
  if (canon.empty()) throw EmptyInputError("empty text");
  const std::u32string scalars = decode_utf8(canon);

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < scalars.size()) {
    while (i < scalars.size() && is_separator(scalars[i])) ++i;
    std::size_t start = i;
    while (i < scalars.size() && !is_separator(scalars[i])) ++i;
    if (i == start) continue;
    const std::u32string word = scalars.substr(start, i - start);
    tokens.push_back(encode_utf8(word));
    const bool has_cjk = std::any_of(word.begin(), word.end(), is_cjk);
    if (has_cjk) {
      for (char32_t c : word) {
        if (is_cjk(c)) tokens.push_back(encode_utf8(c));
      }
      append_ngrams(word, config.ngram_min, config.ngram_max, tokens);
    } else {
      std::u32string marked;
      marked.reserve(word.size() + 2);
      marked.push_back(U'<');
      marked.append(word);
      marked.push_back(U'>');
      append_ngrams(marked, config.ngram_min, config.ngram_max, tokens);
    }
  }
  if (tokens.empty()) throw EmptyInputError("no tokens after separator split");
  return tokens;
}

std::vector<std::uint32_t> token_buckets(const EncoderConfig& config,
                                         std::string_view text) {
  std::vector<std::uint32_t> buckets;
  for (const std::string& token : tokenize(config, text)) {
    buckets.push_back(
        static_cast<std::uint32_t>(fnv1a64(token) % config.hash_buckets));
  }
  return buckets;
}

std::size_t mean_of_rows(const Mat& table,
                         const std::vector<std::uint32_t>& buckets,
                         std::span<double> out) {
  for (std::uint32_t b : buckets) vec_axpy(out, 1.0, table.row(b));
  if (!buckets.empty()) vec_scale(out, 1.0 / static_cast<double>(buckets.size()));
  return buckets.size();
}

double normalize_vector(std::span<double> x) {
  const double n = vec_norm(x);
  if (n < 1e-12) throw NumericError("cannot normalize a near-zero vector");
  vec_scale(x, 1.0 / n);
  return n;
}

EmbeddingVector embed_text(const ModelParams& params, std::string_view text) {
  const std::vector<std::uint32_t> buckets =
      token_buckets(params.config, text);
  EmbeddingVector vec;
  vec.values.assign(params.config.embed_dim, 0.0);
  mean_of_rows(params.embeddings, buckets, vec.values);
  normalize_vector(vec.values);
  vec.space = Space::encoder;
  vec.normalized = true;
  return vec;
}

EmbeddingVector project_title(const ModelParams& params,
                              const EmbeddingVector& encoder_vec) {
  if (encoder_vec.space != Space::encoder) {
    throw ValidationError("project_title expects an encoder-space vector");
  }
  if (encoder_vec.values.size() != params.config.embed_dim) {
    throw ValidationError("projection input has wrong dimension");
  }
  EmbeddingVector out;
  out.values.assign(params.config.projection_dim(), 0.0);
  mat_vec(params.projection, encoder_vec.values, out.values);
  const double n = vec_norm(out.values);
  if (n < 1e-12) throw NumericError("degenerate projection: ||W v|| < 1e-12");
  vec_scale(out.values, 1.0 / n);
  out.space = Space::projected;
  out.normalized = true;
  return out;
}

EmbeddingVector embed_skill_set(const ModelParams& params,
                                const std::vector<std::string>& labels) {
  std::vector<std::string> unique = labels;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty()) throw EmptyInputError("empty skill label list");

  EmbeddingVector out;
  out.values.assign(params.config.embed_dim, 0.0);
  for (const std::string& label : unique) {
    const EmbeddingVector v = embed_text(params, label);
    vec_axpy(out.values, 1.0, v.values);
  }
  vec_scale(out.values, 1.0 / static_cast<double>(unique.size()));
  normalize_vector(out.values);
  out.space = Space::encoder;
  out.normalized = true;
  return out;
}

namespace {

constexpr char kMagic[4] = {'J', 'A', 'L', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in, const std::string& what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw ParseError("checkpoint truncated reading " + what);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);

  nlohmann::ordered_json header;
  header["format_version"] = kFormatVersion;
  header["hash_buckets"] = params.config.hash_buckets;
  header["embed_dim"] = params.config.embed_dim;
  header["proj_dim"] = params.config.projection_dim();
  header["ngram_min"] = params.config.ngram_min;
  header["ngram_max"] = params.config.ngram_max;
  header["hash"] = {{"algorithm", "fnv1a64"},
                    {"offset_basis", "0xcbf29ce484222325"},
                    {"prime", "0x100000001b3"}};
  const std::string header_bytes = header.dump();

  out.write(kMagic, sizeof kMagic);
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(header_bytes.size()));
  out.write(header_bytes.data(),
            static_cast<std::streamsize>(header_bytes.size()));
  auto write_mat = [&out](const Mat& m) {
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  };
  write_mat(params.embeddings);
  write_mat(params.projection);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);

  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError("not a checkpoint file (bad magic): " + path);
  }
  const std::uint32_t version = read_u32(in, "format version");
  if (version != kFormatVersion) {
    throw ParseError("unsupported checkpoint format version " +
                     std::to_string(version));
  }
  const std::uint32_t header_len = read_u32(in, "header length");
  std::string header_bytes(header_len, '\0');
  if (!in.read(header_bytes.data(), header_len)) {
    throw ParseError("checkpoint truncated reading header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid checkpoint header: ") + e.what());
  }

  ModelParams params;
  params.config.hash_buckets = header.at("hash_buckets").get<std::uint32_t>();
  params.config.embed_dim = header.at("embed_dim").get<std::uint32_t>();
  params.config.proj_dim = header.at("proj_dim").get<std::uint32_t>();
  params.config.ngram_min = header.at("ngram_min").get<std::uint32_t>();
  params.config.ngram_max = header.at("ngram_max").get<std::uint32_t>();
  params.config.validate();

  const std::size_t h = params.config.hash_buckets;
  const std::size_t d = params.config.embed_dim;
  const std::size_t p = params.config.projection_dim();
  params.embeddings = Mat(h, d);
  params.projection = Mat(p, d);
  auto read_mat = [&in, &path](Mat& m) {
    if (!in.read(reinterpret_cast<char*>(m.data.data()),
                 static_cast<std::streamsize>(m.data.size() * sizeof(double)))) {
      throw ParseError("checkpoint truncated reading matrices: " + path);
    }
  };
  read_mat(params.embeddings);
  read_mat(params.projection);
  params.check_finite();
  return params;
}

}  // namespace jobalign

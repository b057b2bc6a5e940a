#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jobalign/matrix.hpp"

namespace jobalign {

// FNV-1a, 64-bit: offset basis 0xcbf29ce484222325, prime 0x100000001b3,
// folded over the token's UTF-8 bytes. Fixed so every implementation maps
// the same token to the same bucket.
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffsetBasis;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

struct EncoderConfig {
  std::uint32_t hash_buckets = 1u << 16;
  std::uint32_t embed_dim = 64;
  std::uint32_t ngram_min = 3;
  std::uint32_t ngram_max = 5;
  std::uint32_t proj_dim = 0;  // 0 means "same as embed_dim"

  std::uint32_t projection_dim() const {
    return proj_dim == 0 ? embed_dim : proj_dim;
  }
  void validate() const;  // throws ConfigError
};

// Trainable state: hash-bucket embedding table E (H x d) and the title-side
// projection W (p x d). The projection starts as the identity when p == d so
// the title pathway is a no-op before training.
struct ModelParams {
  EncoderConfig config;
  Mat embeddings;  // H x d
  Mat projection;  // p x d

  static ModelParams init(const EncoderConfig& config, std::uint64_t seed);

  // FNV-1a64 over the raw little-endian bytes of E then W.
  std::uint64_t checksum() const;

  // Throws NumericError naming the first non-finite entry.
  void check_finite() const;
};

enum class Space { encoder, projected };

std::string_view space_name(Space space);

struct EmbeddingVector {
  std::vector<double> values;
  Space space = Space::encoder;
  bool normalized = false;
};

// Splits normalized, lowercased text into word tokens on Unicode
// whitespace/punctuation and adds character n-grams:
//   - plain words get boundary-marked n-grams over "<word>";
//   - words containing CJK ideographs get each CJK scalar as a token plus
//     n-grams over the raw scalar sequence (no boundary markers).
// Throws EmptyInputError when no tokens survive.
std::vector<std::string> tokenize(const EncoderConfig& config,
                                  std::string_view text);

// Hash buckets for tokenize(config, text): fnv1a64(token) % hash_buckets.
std::vector<std::uint32_t> token_buckets(const EncoderConfig& config,
                                         std::string_view text);

// Unit-normalized mean of the bucket rows of E.
EmbeddingVector embed_text(const ModelParams& params, std::string_view text);

// normalize(W v) for an encoder-space unit vector v. Throws NumericError
// when ||W v|| < 1e-12.
EmbeddingVector project_title(const ModelParams& params,
                              const EmbeddingVector& encoder_vec);

// Unit-normalized mean of per-label embeddings. Labels are sorted and
// de-duplicated first so the result is bit-identical under permutation.
EmbeddingVector embed_skill_set(const ModelParams& params,
                                const std::vector<std::string>& labels);

// --- internals shared with the trainer (same arithmetic, same order) ---

// out = (1/n) * sum of bucket rows; returns n. out must be zeroed, length d.
std::size_t mean_of_rows(const Mat& table,
                         const std::vector<std::uint32_t>& buckets,
                         std::span<double> out);

// In-place x /= ||x||; returns the pre-normalization norm.
// Throws NumericError when the norm is below 1e-12.
double normalize_vector(std::span<double> x);

// --- checkpoint container ---
//
// Layout: magic "JALN", u32 LE format version (1), u32 LE header length,
// header JSON (config and hash constants), then E and W row-major as
// little-endian float64.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace jobalign

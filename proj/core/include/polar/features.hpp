#ifndef POLAR_FEATURES_HPP
#define POLAR_FEATURES_HPP

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace polar {

/// Hashed character n-gram feature space. N-grams are taken over Unicode
/// code points after truncating the text to `max_code_points`; each n-gram is
/// hashed with 64-bit FNV-1a over its UTF-8 bytes, the low bits select one of
/// `dim` buckets (dim must be a power of two), and with `signed_hash` the top
/// hash bit contributes the value +1/-1 instead of +1.
struct FeatureSpace {
  int ngram_min = 1;
  int ngram_max = 4;
  std::uint32_t dim = 1u << 18;
  bool signed_hash = false;
  std::uint32_t max_code_points = 256;

  void validate() const;
  bool operator==(const FeatureSpace&) const = default;
};

void to_json(nlohmann::json& j, const FeatureSpace& fs);
void from_json(const nlohmann::json& j, FeatureSpace& fs);

/// Sparse vector sorted by index, no duplicate indices.
struct SparseVec {
  std::vector<std::pair<std::uint32_t, double>> items;

  double squared_norm() const;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Deterministic bag-of-hashed-n-grams with counts, L2-normalized.
SparseVec featurize(std::string_view text, const FeatureSpace& fs);

}  // namespace polar

#endif  // POLAR_FEATURES_HPP

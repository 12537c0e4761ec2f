#include "polar/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "polar/errors.hpp"
#include "unicode.hpp"

namespace polar {

void FeatureSpace::validate() const {
  if (ngram_min < 1 || ngram_min > ngram_max) {
    throw Error(errc::bad_config, "need 1 <= ngram_min <= ngram_max");
  }
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw Error(errc::bad_config, "feature dim must be a power of two >= 2");
  }
  if (max_code_points == 0) {
    throw Error(errc::bad_config, "max_code_points must be positive");
  }
}

void to_json(nlohmann::json& j, const FeatureSpace& fs) {
  j = nlohmann::json{{"ngram_min", fs.ngram_min},
                     {"ngram_max", fs.ngram_max},
                     {"dim", fs.dim},
                     {"signed_hash", fs.signed_hash},
                     {"max_code_points", fs.max_code_points}};
}

void from_json(const nlohmann::json& j, FeatureSpace& fs) {
  j.at("ngram_min").get_to(fs.ngram_min);
  j.at("ngram_max").get_to(fs.ngram_max);
  j.at("dim").get_to(fs.dim);
  j.at("signed_hash").get_to(fs.signed_hash);
  j.at("max_code_points").get_to(fs.max_code_points);
  fs.validate();
}

double SparseVec::squared_norm() const {
  double s = 0.0;
  for (const auto& [idx, val] : items) {
    s += val * val;
  }
  return s;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SparseVec featurize(std::string_view text, const FeatureSpace& fs) {
  fs.validate();
  const std::string_view clipped = uni::truncate_code_points(text, fs.max_code_points);
  const auto offsets = uni::code_point_offsets(clipped);
  const std::size_t n_points = offsets.size() - 1;

  // std::map keeps the accumulation order independent of hash insertion order.
  std::map<std::uint32_t, double> bag;
  for (int n = fs.ngram_min; n <= fs.ngram_max; ++n) {
    if (static_cast<std::size_t>(n) > n_points) {
      break;
    }
    for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= n_points; ++start) {
      const std::size_t from = offsets[start];
      const std::size_t to = offsets[start + static_cast<std::size_t>(n)];
      const std::uint64_t h = fnv1a64(clipped.substr(from, to - from));
      const std::uint32_t idx = static_cast<std::uint32_t>(h & (fs.dim - 1));
      const double value = (fs.signed_hash && (h >> 63)) ? -1.0 : 1.0;
      bag[idx] += value;
    }
  }

  SparseVec vec;
  vec.items.reserve(bag.size());
  for (const auto& [idx, val] : bag) {
    if (val != 0.0) {
      vec.items.emplace_back(idx, val);
    }
  }
  const double norm = std::sqrt(vec.squared_norm());
  if (norm > 0.0) {
    for (auto& [idx, val] : vec.items) {
      val /= norm;
    }
  }
  return vec;
}

}  // namespace polar

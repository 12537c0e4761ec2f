#ifndef POLAR_STRATIFY_HPP
#define POLAR_STRATIFY_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "polar/corpus.hpp"

namespace polar {

struct SplitSpec {
  /// Subset fractions; must each lie in (0,1) and sum to 1 within 1e-9.
  std::vector<double> ratios = {0.85, 0.15};
  std::uint64_t seed = 42;
  /// Split every language bucket independently and concatenate, preserving
  /// per-language label priors. Derived seeds: splitmix64(seed + lang_index + 1).
  bool per_language = true;

  void validate() const;
};

struct SplitResult {
  std::vector<std::string> ids;            // dataset order
  std::vector<std::uint32_t> assignment;   // ids[i] -> assignment[i]
  std::size_t n_subsets = 0;
  std::vector<std::size_t> subset_sizes;
  /// positive_proportion[subset][label]; 0 for an empty subset.
  std::vector<std::vector<double>> positive_proportion;
  std::vector<std::string> warnings;

  std::size_t subset_of(const std::string& id) const;

 private:
  mutable std::unordered_map<std::string, std::size_t> index_;  // built on demand
};

/// Stratified split for the binary subtask: the members of each class are
/// partitioned in the given ratios (largest-remainder rounding, so per-class
/// subset sizes are within one of ratio * class size). A class with no
/// members produces a warning, not an error. Deterministic per seed.
SplitResult stratified_split_binary(const Dataset& d, const SplitSpec& spec);

/// Greedy iterative stratification for the multi-label subtasks. Repeatedly
/// takes the label with the fewest remaining positive examples and assigns
/// each of its unassigned examples to the subset with the greatest remaining
/// fractional demand for that label, breaking ties by greatest total
/// remaining capacity and then by a seeded draw. Demands start at
/// ratio * label support and are decremented as examples land. Examples with
/// no positive labels are distributed last by remaining total capacity.
SplitResult iterative_stratified_split(const Dataset& d, const SplitSpec& spec);

/// Dispatches on the subtask: binary stratification for detect, iterative
/// stratification otherwise.
SplitResult split_dataset(const Dataset& d, const SplitSpec& spec);

/// Extracts the subset datasets (posts and gold rows, dataset order kept).
std::vector<Dataset> materialize_split(const Dataset& d, const SplitResult& result);

}  // namespace polar

#endif  // POLAR_STRATIFY_HPP

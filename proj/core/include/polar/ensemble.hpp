#ifndef POLAR_ENSEMBLE_HPP
#define POLAR_ENSEMBLE_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/prob_matrix.hpp"

namespace polar {

struct EnsembleConfig {
  /// Mixing weight of the first probability source.
  double alpha = 0.7;
  /// Global decision threshold; a probability equal to tau counts as
  /// positive.
  double tau = 0.5;
  /// Per-label thresholds override tau when set. Off by default: global
  /// thresholding measured better under sparse labels.
  std::optional<std::vector<double>> per_label_tau;

  void validate(std::size_t n_labels) const;
};

/// Element-wise alpha * a + (1-alpha) * b. Rows of b are aligned to a's id
/// order first, so the operands may be permutations of each other; they must
/// cover the same id set and subtask.
ProbMatrix combine(const ProbMatrix& a, const ProbMatrix& b, double alpha);

/// k-way generalization with non-negative weights summing to 1; the 2-way
/// combine is the k = 2 case.
ProbMatrix combine_k(std::span<const ProbMatrix> sources, std::span<const double> weights);

/// The default search grid: 0.00, 0.05, ..., 1.00.
std::vector<double> default_alpha_grid();

struct AlphaSearchResult {
  double best_alpha = 0.0;
  double best_score = 0.0;
  /// (alpha, macro-F1) for every grid point, in grid order.
  std::vector<std::pair<double, double>> table;
};

/// Evaluates thresholded combined predictions at every grid point against the
/// gold labels and returns the arg-max, ties broken toward the smallest
/// alpha. Scoring uses the subtask's default macro-F1 scheme.
AlphaSearchResult grid_search_alpha(const ProbMatrix& a, const ProbMatrix& b,
                                    const LabelMatrix& gold, std::span<const double> grid,
                                    double tau);

/// Hard labels: entry = 1 iff probability >= threshold.
LabelMatrix apply_threshold(const ProbMatrix& p, const EnsembleConfig& cfg);

}  // namespace polar

#endif  // POLAR_ENSEMBLE_HPP

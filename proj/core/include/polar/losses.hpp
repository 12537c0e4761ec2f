#ifndef POLAR_LOSSES_HPP
#define POLAR_LOSSES_HPP

#include <optional>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/matrix.hpp"

namespace polar {

// ---------------------------------------------------------------------------
// Class weights
// ---------------------------------------------------------------------------

/// Per-label positive-class weights, w_c = N_neg_c / max(N_pos_c, 1).
struct ClassWeights {
  std::vector<double> w;
};

/// Derives weights from the label frequencies of the given gold matrix. The
/// weight grows inversely with a label's positive frequency; a label with no
/// positives gets w = N_neg via the max(N_pos, 1) clamp. Weights are used as
/// computed, uncapped.
ClassWeights compute_pos_weights(const LabelMatrix& gold);

// ---------------------------------------------------------------------------
// Element-wise losses on logits
// ---------------------------------------------------------------------------

/// Numerically stable logistic function; exact saturation for |z| beyond
/// ~745 instead of overflow.
double sigmoid(double z);

/// log(1 + exp(x)) without overflow, = max(x,0) + log1p(exp(-|x|)).
double softplus(double x);

struct LossValue {
  double loss = 0.0;
  double dloss_dz = 0.0;
};

/// Weighted binary cross-entropy of a single (label, logit) pair:
///
///   loss = -[ w * y * log(sigmoid(z)) + (1 - y) * log(1 - sigmoid(z)) ]
///
/// The weight scales only the positive branch. Everything is evaluated in
/// log-sum-exp form on the logit, never through log(sigmoid(z)) directly:
///   y = 1: loss = w * softplus(-z),  dloss/dz = -w * sigmoid(-z)
///   y = 0: loss = softplus(z),       dloss/dz =  sigmoid(z)
LossValue wbce(int y, double z, double w);

/// Unweighted binary cross-entropy, wbce with w = 1.
LossValue bce(int y, double z);

/// Focal loss -(1 - p_t)^gamma * log(p_t) with p_t the probability assigned
/// to the true class. gamma = 0 reduces exactly to bce. Gradients:
///   y = 1: (1-p)^gamma * (gamma * p * log(p) - (1-p))
///   y = 0: p^gamma     * (p - gamma * (1-p) * log(1-p))
/// with p = sigmoid(z); log(p) and log(1-p) come from softplus for stability.
LossValue focal(int y, double z, double gamma);

// ---------------------------------------------------------------------------
// Batch reduction
// ---------------------------------------------------------------------------

enum class LossKind { bce, wbce, focal };

std::string_view to_string(LossKind k);
std::optional<LossKind> loss_kind_from_string(std::string_view name);

struct LossConfig {
  LossKind kind = LossKind::bce;
  double gamma = 2.0;                    // focal only
  std::optional<ClassWeights> weights;   // required for wbce
  /// Throws bad_config unless the config is usable for n_labels columns.
  void validate(std::size_t n_labels) const;
};

struct BatchLoss {
  double mean_loss = 0.0;
  /// d(mean loss)/d(logit), same shape as the logits; per-element gradients
  /// divided by the element count so step sizes are batch-size independent.
  MatrixD grad;
};

/// Mean loss over all (row, label) elements plus its gradient. Summation is
/// serial in row-major order, so results are deterministic.
BatchLoss batch_loss(const LabelMatrix& gold, const MatrixD& logits, const LossConfig& cfg);

}  // namespace polar

#endif  // POLAR_LOSSES_HPP

#ifndef POLAR_TRAINER_HPP
#define POLAR_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polar/corpus.hpp"
#include "polar/features.hpp"
#include "polar/losses.hpp"
#include "polar/matrix.hpp"
#include "polar/prob_matrix.hpp"

namespace polar {

enum class TrainMode { independent, mtl };

std::string_view to_string(TrainMode m);
std::optional<TrainMode> train_mode_from_string(std::string_view name);

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 20;
  int batch_size = 32;
  /// Fraction of total steps spent ramping the learning rate 0 -> 1 before
  /// the linear decay back to 0.
  double warmup_ratio = 0.1;
  /// Consecutive epochs without a validation improvement before stopping;
  /// 0 stops after the first non-improving epoch.
  int patience = 2;
  std::uint64_t seed = 42;
  LossConfig loss;
  TrainMode mode = TrainMode::independent;
  /// Per-task loss coefficients in mtl mode; tasks default to weight 1.
  std::map<Subtask, double> task_weights;

  void validate() const;
  nlohmann::json to_json() const;
};

/// Scale factor for the learning rate at `step` of `total_steps`: a linear
/// ramp from 0 to 1 over the first ceil(warmup_ratio * total) steps, then a
/// linear decay to 0 at total_steps.
double lr_multiplier(std::int64_t step, std::int64_t total_steps, double warmup_ratio);

/// Binary-relevance linear classifier over hashed n-gram features: one
/// weight row and bias per canonical label, logits z_c = W_c . x + b_c.
class LinearBRModel {
 public:
  LinearBRModel() = default;
  LinearBRModel(Subtask st, FeatureSpace fs);

  Subtask subtask() const { return subtask_; }
  const FeatureSpace& feature_space() const { return feature_space_; }
  std::size_t n_labels() const { return bias_.size(); }

  MatrixD& weights() { return weights_; }
  const MatrixD& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

  const std::string& config_fingerprint() const { return config_fingerprint_; }
  void set_config_fingerprint(std::string fp) { config_fingerprint_ = std::move(fp); }

  std::vector<double> logits(const SparseVec& x) const;

  nlohmann::json to_json() const;
  static LinearBRModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static LinearBRModel load(const std::filesystem::path& path);

 private:
  Subtask subtask_ = Subtask::detect;
  FeatureSpace feature_space_;
  MatrixD weights_;  // n_labels x dim
  std::vector<double> bias_;
  std::string config_fingerprint_;
};

/// Sigmoid posteriors for each post, rows in input order.
ProbMatrix predict_proba(const LinearBRModel& model, std::span<const Post> posts,
                         std::string source_tag = "linear_br");

struct EpochLog {
  int epoch = 0;  // 1-based
  double mean_train_loss = 0.0;
  double val_macro_f1 = 0.0;
  bool improved = false;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_val_macro_f1 = 0.0;
  std::int64_t total_steps = 0;
  bool early_stopped = false;
};

nlohmann::json to_json(const TrainLog& log);

struct TrainResult {
  LinearBRModel model;
  TrainLog log;
};

/// Mini-batch gradient descent with the warmup/decay schedule. After every
/// epoch the model is scored on `val` (macro-F1 at threshold 0.5, the
/// subtask's default scheme); the best-epoch snapshot is returned and
/// training stops once `patience` consecutive epochs fail to improve it.
/// Runs are bitwise deterministic for a fixed seed: shuffling uses the
/// documented PRNG contract and all reductions are serial. For wbce without
/// explicit weights, pos-weights are computed from the training split.
TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const FeatureSpace& fs);

/// Multi-task bundle: per-task train/val datasets joined by post id. Posts
/// carrying the same id in different tasks must carry the same text.
struct MtlBundle {
  std::map<Subtask, Dataset> train;
  std::map<Subtask, Dataset> val;
};

struct MtlResult {
  std::map<Subtask, LinearBRModel> models;
  TrainLog log;
};

/// Shared multi-task training: one pass over the union of posts per epoch,
/// with the loss summed over task heads (weighted by task_weights; a post
/// missing from a task contributes nothing to that task, and each task's
/// batch loss is normalized by its own element count). Validation scores the
/// mean macro-F1 over tasks with a val set. With every weight at zero except
/// one task's, the trajectory of that task's head is identical to
/// independent training under the same batching.
MtlResult train_mtl(const MtlBundle& bundle, const TrainConfig& cfg, const FeatureSpace& fs);

}  // namespace polar

#endif  // POLAR_TRAINER_HPP

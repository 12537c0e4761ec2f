#ifndef POLAR_TOOLS_COMMON_HPP
#define POLAR_TOOLS_COMMON_HPP

#include <CLI11.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polar/corpus.hpp"
#include "polar/ensemble.hpp"
#include "polar/trainer.hpp"

namespace polar::cli {

// Exit codes: 0 success, 2 usage error, 3 data error, 4 stage failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitStage = 4;

Subtask parse_subtask(const std::string& name);
FileFormat resolve_format(const std::string& flag, const std::filesystem::path& path);
std::vector<double> parse_double_list(const std::string& csv);

/// "task=value" pairs from repeatable flags, e.g. --task-weight type=0.5.
std::pair<Subtask, std::string> parse_task_pair(const std::string& spec);

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

/// Runs `body` and converts any failure into a stage-labeled error so the
/// pipeline exit code and message identify the failing stage.
template <typename Fn>
void run_stage(const std::string& name, Fn&& body) {
  try {
    body();
  } catch (const Error& e) {
    throw Error(errc::stage_failure, "stage '" + name + "': " + e.what());
  } catch (const std::exception& e) {
    throw Error(errc::stage_failure, "stage '" + name + "': " + e.what());
  }
}

/// Option bundle shared by every command that trains models.
struct TrainOptions {
  std::string loss = "bce";
  double gamma = 2.0;
  double lr = 0.5;
  int epochs = 20;
  int batch_size = 32;
  double warmup_ratio = 0.1;
  int patience = 2;
  std::uint64_t seed = 42;
  int ngram_min = 1;
  int ngram_max = 4;
  std::uint32_t dim = 1u << 18;
  bool signed_hash = false;

  void attach(CLI::App* cmd);
  TrainConfig train_config() const;
  FeatureSpace feature_space() const;
};

void register_data_commands(CLI::App& app);      // stats, split
void register_model_commands(CLI::App& app);     // train, predict, ablate-loss
void register_ensemble_commands(CLI::App& app);  // tune-alpha, ensemble
void register_eval_commands(CLI::App& app);      // evaluate, audit, gate, report
void register_pipeline_command(CLI::App& app);   // pipeline

}  // namespace polar::cli

#endif  // POLAR_TOOLS_COMMON_HPP

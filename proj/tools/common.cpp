#include "common.hpp"

#include <fstream>

namespace polar::cli {

Subtask parse_subtask(const std::string& name) {
  auto st = subtask_from_string(name);
  if (!st) {
    throw Error(errc::bad_config, "unknown subtask '" + name + "' (detect|type|manifest)");
  }
  return *st;
}

FileFormat resolve_format(const std::string& flag, const std::filesystem::path& path) {
  if (flag == "auto") {
    return format_for_path(path);
  }
  auto fmt = format_from_string(flag);
  if (!fmt) {
    throw Error(errc::bad_config, "unknown format '" + flag + "' (csv|jsonl|auto)");
  }
  return *fmt;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string item =
        csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (end == item.c_str() || *end != '\0') {
        throw Error(errc::bad_config, "'" + item + "' is not a number");
      }
      out.push_back(v);
    }
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  if (out.empty()) {
    throw Error(errc::bad_config, "empty number list '" + csv + "'");
  }
  return out;
}

std::pair<Subtask, std::string> parse_task_pair(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq == std::string::npos) {
    throw Error(errc::bad_config, "expected task=value, got '" + spec + "'");
  }
  return {parse_subtask(spec.substr(0, eq)), spec.substr(eq + 1)};
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

void TrainOptions::attach(CLI::App* cmd) {
  cmd->add_option("--loss", loss, "Loss function: bce, wbce or focal")
      ->check(CLI::IsMember({"bce", "wbce", "focal"}))
      ->capture_default_str();
  cmd->add_option("--gamma", gamma, "Focal loss gamma")->capture_default_str();
  cmd->add_option("--lr", lr, "Learning rate")->capture_default_str();
  cmd->add_option("--epochs", epochs, "Maximum training epochs")->capture_default_str();
  cmd->add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--warmup-ratio", warmup_ratio, "Linear-schedule warmup ratio")
      ->capture_default_str();
  cmd->add_option("--patience", patience, "Early-stopping patience in epochs")
      ->capture_default_str();
  cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  cmd->add_option("--ngram-min", ngram_min, "Smallest character n-gram")->capture_default_str();
  cmd->add_option("--ngram-max", ngram_max, "Largest character n-gram")->capture_default_str();
  cmd->add_option("--dim", dim, "Hashed feature dimension (power of two)")
      ->capture_default_str();
  cmd->add_flag("--signed-hash", signed_hash, "Use signed feature hashing");
}

TrainConfig TrainOptions::train_config() const {
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.warmup_ratio = warmup_ratio;
  cfg.patience = patience;
  cfg.seed = seed;
  cfg.loss.kind = *loss_kind_from_string(loss);
  cfg.loss.gamma = gamma;
  return cfg;
}

FeatureSpace TrainOptions::feature_space() const {
  FeatureSpace fs;
  fs.ngram_min = ngram_min;
  fs.ngram_max = ngram_max;
  fs.dim = dim;
  fs.signed_hash = signed_hash;
  return fs;
}

}  // namespace polar::cli

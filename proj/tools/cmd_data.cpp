#include <iostream>
#include <sstream>

#include "common.hpp"
#include "polar/stratify.hpp"

namespace polar::cli {

namespace {

struct StatsOptions {
  std::string input;
  std::string subtask;
  std::string format = "auto";
  std::string out_prefix;
  std::string validate_partition;
};

void run_stats(const StatsOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const Dataset d =
      load_dataset(opt.input, st, resolve_format(opt.format, opt.input));
  if (d.dropped_rows > 0) {
    std::cout << "dropped " << d.dropped_rows << " empty-text rows\n";
  }

  const StatsReport report = dataset_stats(d);
  const auto labels = labels_of(st);
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& s = report.rate_summary[l];
    std::cout << labels[l] << ": positive rate min/median/max = " << s.min << "/" << s.median
              << "/" << s.max << " over " << report.rows_per_language.size() << " languages\n";
  }

  if (!opt.out_prefix.empty()) {
    std::ofstream csv_out(opt.out_prefix + ".csv", std::ios::binary);
    if (!csv_out) {
      throw Error(errc::io_failure, "cannot write " + opt.out_prefix + ".csv");
    }
    write_stats_csv(report, csv_out);
    write_json_file(stats_to_json(report), opt.out_prefix + ".json");
  }

  if (!opt.validate_partition.empty()) {
    auto partition = partition_from_string(opt.validate_partition);
    if (!partition) {
      throw Error(errc::bad_config, "unknown partition '" + opt.validate_partition + "'");
    }
    const auto mismatches = validate_against_reference(d, official_counts_for(*partition));
    if (mismatches.empty()) {
      std::cout << "reference check (" << opt.validate_partition << "): all per-language counts match\n";
    } else {
      for (const auto& m : mismatches) {
        std::cout << "reference mismatch: " << to_string(m.lang) << " expected " << m.expected
                  << ", found " << m.actual << "\n";
      }
    }
  }
}

struct SplitOptions {
  std::string input;
  std::string subtask;
  std::string format = "auto";
  std::string out_dir;
  std::string ratios = "0.85,0.15";
  std::uint64_t seed = 42;
  bool global_split = false;
};

void run_split(const SplitOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const Dataset d = load_dataset(opt.input, st, resolve_format(opt.format, opt.input));

  SplitSpec spec;
  spec.ratios = parse_double_list(opt.ratios);
  spec.seed = opt.seed;
  spec.per_language = !opt.global_split;

  const SplitResult result = split_dataset(d, spec);
  for (const auto& warning : result.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  std::filesystem::create_directories(opt.out_dir);
  const auto parts = materialize_split(d, result);
  nlohmann::json manifest;
  manifest["seed"] = spec.seed;
  manifest["ratios"] = spec.ratios;
  manifest["per_language"] = spec.per_language;
  manifest["subtask"] = std::string(to_string(st));
  manifest["files"] = nlohmann::json::array();
  manifest["subset_sizes"] = result.subset_sizes;

  const auto labels = labels_of(st);
  nlohmann::json proportions = nlohmann::json::array();
  for (std::size_t j = 0; j < result.n_subsets; ++j) {
    nlohmann::json entry = nlohmann::json::object();
    for (std::size_t l = 0; l < labels.size(); ++l) {
      entry[std::string(labels[l])] = result.positive_proportion[j][l];
    }
    proportions.push_back(entry);
  }
  manifest["positive_proportion"] = proportions;

  for (std::size_t j = 0; j < parts.size(); ++j) {
    const std::string name = "split-" + std::to_string(j) + ".jsonl";
    save_dataset(parts[j], std::filesystem::path(opt.out_dir) / name, FileFormat::jsonl);
    manifest["files"].push_back(name);
  }
  write_json_file(manifest, std::filesystem::path(opt.out_dir) / "split-manifest.json");
  std::cout << "wrote " << parts.size() << " subsets to " << opt.out_dir << "\n";
}

}  // namespace

void register_data_commands(CLI::App& app) {
  auto stats_opt = std::make_shared<StatsOptions>();
  CLI::App* stats = app.add_subcommand("stats", "Per-language label statistics of a dataset");
  stats->add_option("--input", stats_opt->input, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--subtask", stats_opt->subtask, "detect, type or manifest")->required();
  stats->add_option("--format", stats_opt->format, "csv, jsonl or auto");
  stats->add_option("--out", stats_opt->out_prefix, "Write <prefix>.csv and <prefix>.json");
  stats->add_option("--validate-reference", stats_opt->validate_partition,
                    "Check per-language counts against the official release table "
                    "(train|dev|test|merged)");
  stats->callback([stats_opt] { run_stats(*stats_opt); });

  auto split_opt = std::make_shared<SplitOptions>();
  CLI::App* split = app.add_subcommand("split", "Stratified train/holdout split");
  split->add_option("--input", split_opt->input, "Dataset file with gold labels")
      ->required()
      ->check(CLI::ExistingFile);
  split->add_option("--subtask", split_opt->subtask, "detect, type or manifest")->required();
  split->add_option("--format", split_opt->format, "csv, jsonl or auto");
  split->add_option("--out-dir", split_opt->out_dir, "Output directory")->required();
  split->add_option("--ratios", split_opt->ratios, "Subset fractions, e.g. 0.85,0.15")
      ->capture_default_str();
  split->add_option("--seed", split_opt->seed, "Random seed")->capture_default_str();
  split->add_flag("--global-split", split_opt->global_split,
                  "Split globally instead of per language");
  split->callback([split_opt] { run_split(*split_opt); });
}

}  // namespace polar::cli

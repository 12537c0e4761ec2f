#include <iostream>

#include "common.hpp"
#include "polar/eval.hpp"

namespace polar::cli {

namespace {

struct TuneOptions {
  std::string probs_a;
  std::string probs_b;
  std::string gold_path;
  std::string subtask;
  std::string format = "auto";
  std::string grid;
  double tau = 0.5;
  std::string out;
};

void run_tune_alpha(const TuneOptions& opt) {
  std::optional<Subtask> st;
  if (!opt.subtask.empty()) {
    st = parse_subtask(opt.subtask);
  }
  const ProbMatrix a = load_probs(opt.probs_a, format_for_path(opt.probs_a), st);
  const ProbMatrix b = load_probs(opt.probs_b, format_for_path(opt.probs_b), st);
  const LabelMatrix gold = load_labels_flexible(
      opt.gold_path, a.subtask, resolve_format(opt.format, opt.gold_path));

  const std::vector<double> grid =
      opt.grid.empty() ? default_alpha_grid() : parse_double_list(opt.grid);
  const AlphaSearchResult result = grid_search_alpha(a, b, gold, grid, opt.tau);

  nlohmann::json table = nlohmann::json::array();
  for (const auto& [alpha, score] : result.table) {
    table.push_back({{"alpha", alpha}, {"macro_f1", score}});
  }
  nlohmann::json j{{"best_alpha", result.best_alpha},
                   {"best_macro_f1", result.best_score},
                   {"tau", opt.tau},
                   {"sources", {a.source, b.source}},
                   {"table", std::move(table)}};
  if (!opt.out.empty()) {
    write_json_file(j, opt.out);
  }
  std::cout << "best alpha " << result.best_alpha << " (dev macro-F1 " << result.best_score
            << ")\n";
}

struct EnsembleOptions {
  std::vector<std::string> probs;
  double alpha = 0.7;
  std::string weights;
  double tau = 0.5;
  std::string per_label_tau;
  std::string out;
  std::string out_probs;
  std::string subtask;
};

void run_ensemble(const EnsembleOptions& opt) {
  if (opt.probs.size() < 2) {
    throw Error(errc::bad_config, "need at least two --probs files");
  }
  std::optional<Subtask> st;
  if (!opt.subtask.empty()) {
    st = parse_subtask(opt.subtask);
  }
  std::vector<ProbMatrix> sources;
  sources.reserve(opt.probs.size());
  for (const auto& path : opt.probs) {
    sources.push_back(load_probs(path, format_for_path(path), st));
  }

  ProbMatrix mixed;
  if (opt.probs.size() == 2 && opt.weights.empty()) {
    mixed = combine(sources[0], sources[1], opt.alpha);
  } else {
    std::vector<double> weights;
    if (opt.weights.empty()) {
      throw Error(errc::bad_config, "k-way ensembling needs --weights w1,w2,...");
    }
    weights = parse_double_list(opt.weights);
    mixed = combine_k(sources, weights);
  }

  EnsembleConfig cfg;
  cfg.alpha = opt.alpha;
  cfg.tau = opt.tau;
  if (!opt.per_label_tau.empty()) {
    cfg.per_label_tau = parse_double_list(opt.per_label_tau);
  }

  if (!opt.out_probs.empty()) {
    save_probs(mixed, opt.out_probs, format_for_path(opt.out_probs));
  }
  const LabelMatrix pred = apply_threshold(mixed, cfg);
  save_labels(pred, opt.out, format_for_path(opt.out));
  std::cout << "wrote " << pred.rows() << " prediction rows to " << opt.out << "\n";
}

}  // namespace

void register_ensemble_commands(CLI::App& app) {
  auto tune_opt = std::make_shared<TuneOptions>();
  CLI::App* tune = app.add_subcommand(
      "tune-alpha", "Grid-search the ensemble mixing weight on labeled dev data");
  tune->add_option("--probs-a", tune_opt->probs_a, "First probability file")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--probs-b", tune_opt->probs_b, "Second probability file")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--gold", tune_opt->gold_path, "Gold labels (label file or dataset)")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--subtask", tune_opt->subtask,
                   "detect, type or manifest (when no sidecar manifest exists)");
  tune->add_option("--format", tune_opt->format, "Gold file format: csv, jsonl or auto");
  tune->add_option("--grid", tune_opt->grid, "Comma list of alphas (default 0,0.05,...,1)");
  tune->add_option("--tau", tune_opt->tau, "Decision threshold")->capture_default_str();
  tune->add_option("--out", tune_opt->out, "Write the score table (json)");
  tune->callback([tune_opt] { run_tune_alpha(*tune_opt); });

  auto ens_opt = std::make_shared<EnsembleOptions>();
  CLI::App* ens = app.add_subcommand(
      "ensemble", "Weighted probability averaging followed by thresholding");
  ens->add_option("--probs", ens_opt->probs, "Probability files (repeat; first is weighted alpha)")
      ->required()
      ->check(CLI::ExistingFile);
  ens->add_option("--alpha", ens_opt->alpha, "Weight of the first source (two sources)")
      ->capture_default_str();
  ens->add_option("--weights", ens_opt->weights, "Comma list of weights for k-way ensembling");
  ens->add_option("--tau", ens_opt->tau, "Global decision threshold")->capture_default_str();
  ens->add_option("--per-label-tau", ens_opt->per_label_tau,
                  "Per-label thresholds overriding tau (comma list)");
  ens->add_option("--out", ens_opt->out, "Thresholded label file")->required();
  ens->add_option("--out-probs", ens_opt->out_probs, "Also write the combined probabilities");
  ens->add_option("--subtask", ens_opt->subtask,
                  "detect, type or manifest (when no sidecar manifest exists)");
  ens->callback([ens_opt] { run_ensemble(*ens_opt); });
}

}  // namespace polar::cli

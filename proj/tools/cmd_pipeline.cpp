#include <fstream>
#include <iostream>

#include "common.hpp"
#include "polar/eval.hpp"
#include "polar/plots.hpp"
#include "polar/stratify.hpp"

namespace polar::cli {

namespace {

struct PipelineOptions {
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string subtask;
  std::string format = "auto";
  std::string out_dir = "pipeline-out";
  std::string ratios = "0.85,0.15";
  bool global_split = false;
  double tau = 0.5;
  std::string grid;
  TrainOptions train;
  // model B defaults complement model A's feature space
  int b_ngram_min = 2;
  int b_ngram_max = 5;
  std::uint32_t b_dim = 1u << 17;
};

double thresholded_macro(const ProbMatrix& probs, const LabelMatrix& gold, double tau) {
  EnsembleConfig cfg;
  cfg.tau = tau;
  return macro_f1(gold, apply_threshold(probs, cfg), default_scheme(gold.subtask()));
}

void run_pipeline(const PipelineOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  nlohmann::json manifest;
  manifest["subtask"] = std::string(to_string(st));
  manifest["seed"] = opt.train.seed;
  manifest["tau"] = opt.tau;
  std::vector<std::string> stage_names;

  // ---- load inputs -------------------------------------------------------
  Dataset train_full, holdout, test_set;
  run_stage("load", [&] {
    train_full = load_dataset(opt.train_path, st, resolve_format(opt.format, opt.train_path),
                              Partition::train);
    test_set = load_dataset(opt.test_path, st, resolve_format(opt.format, opt.test_path),
                            Partition::test);
  });
  stage_names.push_back("load");

  // ---- split (or adopt the provided dev set) -----------------------------
  Dataset subtrain;
  if (opt.dev_path.empty()) {
    run_stage("split", [&] {
      SplitSpec spec;
      spec.ratios = parse_double_list(opt.ratios);
      spec.seed = opt.train.seed;
      spec.per_language = !opt.global_split;
      const SplitResult result = split_dataset(train_full, spec);
      auto parts = materialize_split(train_full, result);
      subtrain = std::move(parts[0]);
      holdout = std::move(parts[1]);
      save_dataset(subtrain, dir / "split-0.jsonl", FileFormat::jsonl);
      save_dataset(holdout, dir / "split-1.jsonl", FileFormat::jsonl);
      nlohmann::json split_manifest{{"seed", spec.seed},
                                    {"ratios", spec.ratios},
                                    {"per_language", spec.per_language},
                                    {"sizes", result.subset_sizes}};
      write_json_file(split_manifest, dir / "split-manifest.json");
    });
    stage_names.push_back("split");
  } else {
    run_stage("load-dev", [&] {
      subtrain = train_full;
      holdout = load_dataset(opt.dev_path, st, resolve_format(opt.format, opt.dev_path),
                             Partition::dev);
    });
    stage_names.push_back("load-dev");
  }

  // ---- train the two complementary models --------------------------------
  TrainConfig cfg_a = opt.train.train_config();
  cfg_a.seed = opt.train.seed;
  const FeatureSpace fs_a = opt.train.feature_space();

  TrainConfig cfg_b = cfg_a;
  cfg_b.seed = opt.train.seed + 1;
  FeatureSpace fs_b = fs_a;
  fs_b.ngram_min = opt.b_ngram_min;
  fs_b.ngram_max = opt.b_ngram_max;
  fs_b.dim = opt.b_dim;

  LinearBRModel model_a, model_b;
  run_stage("train-a", [&] {
    TrainResult r = train(subtrain, holdout, cfg_a, fs_a);
    r.model.save(dir / "model-a.json");
    write_json_file(to_json(r.log), dir / "model-a-log.json");
    model_a = std::move(r.model);
  });
  stage_names.push_back("train-a");
  run_stage("train-b", [&] {
    TrainResult r = train(subtrain, holdout, cfg_b, fs_b);
    r.model.save(dir / "model-b.json");
    write_json_file(to_json(r.log), dir / "model-b-log.json");
    model_b = std::move(r.model);
  });
  stage_names.push_back("train-b");

  // ---- dev probabilities and alpha search --------------------------------
  ProbMatrix dev_a, dev_b;
  run_stage("predict-dev", [&] {
    dev_a = predict_proba(model_a, holdout.posts, "model-a");
    dev_b = predict_proba(model_b, holdout.posts, "model-b");
    save_probs(dev_a, dir / "dev-probs-a.csv", FileFormat::csv);
    save_probs(dev_b, dir / "dev-probs-b.csv", FileFormat::csv);
  });
  stage_names.push_back("predict-dev");

  double alpha = 0.7;
  run_stage("tune-alpha", [&] {
    if (!holdout.gold) {
      throw Error(errc::no_gold_labels, "alpha tuning needs gold labels on the dev split");
    }
    const std::vector<double> grid =
        opt.grid.empty() ? default_alpha_grid() : parse_double_list(opt.grid);
    const AlphaSearchResult result =
        grid_search_alpha(dev_a, dev_b, *holdout.gold, grid, opt.tau);
    alpha = result.best_alpha;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [a, score] : result.table) {
      table.push_back({{"alpha", a}, {"macro_f1", score}});
    }
    write_json_file(nlohmann::json{{"best_alpha", result.best_alpha},
                                   {"best_macro_f1", result.best_score},
                                   {"table", std::move(table)}},
                    dir / "alpha-table.json");
  });
  stage_names.push_back("tune-alpha");
  manifest["alpha"] = alpha;

  // ---- test predictions ---------------------------------------------------
  ProbMatrix test_a, test_b, test_mixed;
  run_stage("predict-test", [&] {
    test_a = predict_proba(model_a, test_set.posts, "model-a");
    test_b = predict_proba(model_b, test_set.posts, "model-b");
    save_probs(test_a, dir / "test-probs-a.csv", FileFormat::csv);
    save_probs(test_b, dir / "test-probs-b.csv", FileFormat::csv);
  });
  stage_names.push_back("predict-test");

  LabelMatrix test_pred;
  run_stage("ensemble", [&] {
    test_mixed = combine(test_a, test_b, alpha);
    save_probs(test_mixed, dir / "test-probs-ensemble.csv", FileFormat::csv);
    EnsembleConfig cfg;
    cfg.alpha = alpha;
    cfg.tau = opt.tau;
    test_pred = apply_threshold(test_mixed, cfg);
    save_labels(test_pred, dir / "test-pred.csv", FileFormat::csv);
  });
  stage_names.push_back("ensemble");

  // ---- evaluation (when test gold is available) ---------------------------
  if (test_set.gold) {
    run_stage("evaluate", [&] {
      const EvalReport report = evaluate(*test_set.gold, test_pred);
      std::ofstream csv_out(dir / "eval-report.csv", std::ios::binary);
      if (!csv_out) {
        throw Error(errc::io_failure, "cannot write eval-report.csv");
      }
      write_report_csv(report, csv_out);
      write_json_file(report_to_json(report), dir / "eval-report.json");
      write_f1_chart(report, dir / "f1.svg");
      write_pr_gap_chart(report, dir / "pr_gap.svg");
      const PerLanguageReports by_lang =
          per_language_report(*test_set.gold, test_pred, test_set.posts);
      write_json_file(per_language_to_json(by_lang), dir / "by-language.json");
      write_language_chart(by_lang, dir / "by-language.svg");

      manifest["test_scores"] = {
          {"model_a", thresholded_macro(test_a, *test_set.gold, opt.tau)},
          {"model_b", thresholded_macro(test_b, *test_set.gold, opt.tau)},
          {"ensemble", report.macro},
      };
    });
    stage_names.push_back("evaluate");
  }

  manifest["stages"] = stage_names;
  write_json_file(manifest, dir / "pipeline-manifest.json");
  std::cout << "pipeline finished; artifacts in " << opt.out_dir << "\n";
  if (manifest.contains("test_scores")) {
    std::cout << "test macro-F1: model-a " << manifest["test_scores"]["model_a"]
              << ", model-b " << manifest["test_scores"]["model_b"] << ", ensemble "
              << manifest["test_scores"]["ensemble"] << " (alpha " << alpha << ")\n";
  }
}

}  // namespace

void register_pipeline_command(CLI::App& app) {
  auto opt = std::make_shared<PipelineOptions>();
  CLI::App* cmd = app.add_subcommand(
      "pipeline", "split -> train two models -> tune alpha -> ensemble -> evaluate");
  cmd->add_option("--train", opt->train_path, "Training dataset")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--dev", opt->dev_path,
                  "Labeled dev dataset; when omitted an internal split of --train is used")
      ->check(CLI::ExistingFile);
  cmd->add_option("--test", opt->test_path, "Test dataset to predict")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--subtask", opt->subtask, "detect, type or manifest")->required();
  cmd->add_option("--format", opt->format, "csv, jsonl or auto");
  cmd->add_option("--out-dir", opt->out_dir, "Artifact directory")->capture_default_str();
  cmd->add_option("--ratios", opt->ratios, "Internal split fractions")->capture_default_str();
  cmd->add_flag("--global-split", opt->global_split, "Split globally instead of per language");
  cmd->add_option("--tau", opt->tau, "Global decision threshold")->capture_default_str();
  cmd->add_option("--grid", opt->grid, "Alpha grid (default 0,0.05,...,1)");
  opt->train.attach(cmd);
  cmd->add_option("--b-ngram-min", opt->b_ngram_min, "Model B smallest n-gram")
      ->capture_default_str();
  cmd->add_option("--b-ngram-max", opt->b_ngram_max, "Model B largest n-gram")
      ->capture_default_str();
  cmd->add_option("--b-dim", opt->b_dim, "Model B feature dimension")->capture_default_str();
  cmd->callback([opt] { run_pipeline(*opt); });
}

}  // namespace polar::cli

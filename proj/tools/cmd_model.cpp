#include <fstream>
#include <iostream>
#include <set>

#include "common.hpp"
#include "polar/eval.hpp"

namespace polar::cli {

namespace {

struct TrainCmdOptions {
  std::string train_path;
  std::string val_path;
  std::string subtask;
  std::string format = "auto";
  std::string out = "model.json";
  std::string log_path;
  std::string mode = "independent";
  std::vector<std::string> mtl_train;
  std::vector<std::string> mtl_val;
  std::vector<std::string> task_weights;
  TrainOptions train;
};

void run_train(const TrainCmdOptions& opt) {
  TrainConfig cfg = opt.train.train_config();
  const FeatureSpace fs = opt.train.feature_space();
  auto mode = train_mode_from_string(opt.mode);
  if (!mode) {
    throw Error(errc::bad_config, "unknown mode '" + opt.mode + "'");
  }
  cfg.mode = *mode;
  for (const auto& spec : opt.task_weights) {
    auto [task, value] = parse_task_pair(spec);
    cfg.task_weights[task] = std::stod(value);
  }

  if (cfg.mode == TrainMode::independent) {
    const Subtask st = parse_subtask(opt.subtask);
    const Dataset train_set =
        load_dataset(opt.train_path, st, resolve_format(opt.format, opt.train_path));
    const Dataset val_set =
        load_dataset(opt.val_path, st, resolve_format(opt.format, opt.val_path));
    const TrainResult result = train(train_set, val_set, cfg, fs);
    result.model.save(opt.out);
    if (!opt.log_path.empty()) {
      write_json_file(to_json(result.log), opt.log_path);
    }
    std::cout << "best epoch " << result.log.best_epoch << ", val macro-F1 "
              << result.log.best_val_macro_f1 << ", model -> " << opt.out << "\n";
    return;
  }

  if (opt.mtl_train.empty()) {
    throw Error(errc::bad_config, "mtl mode needs --mtl-train task=path entries");
  }
  MtlBundle bundle;
  for (const auto& spec : opt.mtl_train) {
    auto [task, path] = parse_task_pair(spec);
    bundle.train[task] = load_dataset(path, task, resolve_format(opt.format, path));
  }
  for (const auto& spec : opt.mtl_val) {
    auto [task, path] = parse_task_pair(spec);
    bundle.val[task] = load_dataset(path, task, resolve_format(opt.format, path));
  }
  const MtlResult result = train_mtl(bundle, cfg, fs);

  // --out is used as a prefix: <prefix>-<task>.json
  std::string prefix = opt.out;
  const std::string suffix = ".json";
  if (prefix.size() > suffix.size() &&
      prefix.compare(prefix.size() - suffix.size(), suffix.size(), suffix) == 0) {
    prefix.resize(prefix.size() - suffix.size());
  }
  for (const auto& [task, model] : result.models) {
    model.save(prefix + "-" + std::string(to_string(task)) + ".json");
  }
  if (!opt.log_path.empty()) {
    write_json_file(to_json(result.log), opt.log_path);
  }
  std::cout << "best epoch " << result.log.best_epoch << ", mean val macro-F1 "
            << result.log.best_val_macro_f1 << ", models -> " << prefix << "-<task>.json\n";
}

struct PredictOptions {
  std::string model_path;
  std::string input;
  std::string format = "auto";
  std::string out;
  std::string source_tag;
};

void run_predict(const PredictOptions& opt) {
  const LinearBRModel model = LinearBRModel::load(opt.model_path);
  const Dataset d = load_dataset(opt.input, model.subtask(),
                                 resolve_format(opt.format, opt.input));
  const std::string tag = opt.source_tag.empty()
                              ? std::filesystem::path(opt.model_path).stem().string()
                              : opt.source_tag;
  const ProbMatrix probs = predict_proba(model, d.posts, tag);
  save_probs(probs, opt.out, format_for_path(opt.out));
  std::cout << "wrote " << probs.rows() << " rows of probabilities to " << opt.out << "\n";
}

struct AblateOptions {
  std::string train_path;
  std::string val_path;
  std::string subtask;
  std::string format = "auto";
  std::string losses = "bce,focal,wbce";
  std::string out = "ablation.csv";
  TrainOptions train;
};

/// Trains one model per requested loss under an identical config/seed and
/// tabulates per-language val macro-F1, one row per language plus a pooled
/// row. When both are present, a delta column reports wbce minus bce.
void run_ablate(const AblateOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const Dataset train_set =
      load_dataset(opt.train_path, st, resolve_format(opt.format, opt.train_path));
  const Dataset val_set =
      load_dataset(opt.val_path, st, resolve_format(opt.format, opt.val_path));
  if (!val_set.gold) {
    throw Error(errc::no_gold_labels, "ablation needs val gold labels");
  }
  const FeatureSpace fs = opt.train.feature_space();

  std::vector<std::string> losses;
  std::size_t pos = 0;
  while (pos <= opt.losses.size()) {
    const std::size_t comma = opt.losses.find(',', pos);
    const std::string item =
        opt.losses.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      if (!loss_kind_from_string(item)) {
        throw Error(errc::bad_config, "unknown loss '" + item + "'");
      }
      losses.push_back(item);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  // per loss: pooled macro plus per-language macro on the val split
  std::map<std::string, std::map<Lang, double>> by_lang;
  std::map<std::string, double> pooled;
  for (const auto& loss_name : losses) {
    TrainConfig cfg = opt.train.train_config();
    cfg.loss.kind = *loss_kind_from_string(loss_name);
    cfg.loss.weights.reset();
    const TrainResult result = train(train_set, val_set, cfg, fs);
    const ProbMatrix probs = predict_proba(result.model, val_set.posts, loss_name);
    EnsembleConfig ecfg;
    const LabelMatrix pred = apply_threshold(probs, ecfg);
    const PerLanguageReports reports = per_language_report(*val_set.gold, pred, val_set.posts);
    pooled[loss_name] = reports.pooled.macro;
    for (const auto& [lang, report] : reports.by_language) {
      by_lang[loss_name][lang] = report.macro;
    }
  }

  const bool with_delta = pooled.count("bce") && pooled.count("wbce");
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + opt.out);
  }
  out << "lang";
  for (const auto& loss_name : losses) {
    out << "," << loss_name;
  }
  if (with_delta) {
    out << ",delta_wbce_minus_bce";
  }
  out << "\n";
  char buf[32];
  auto fmt4 = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  std::set<Lang> langs;
  for (const auto& [loss_name, scores] : by_lang) {
    for (const auto& [lang, score] : scores) {
      langs.insert(lang);
    }
  }
  for (Lang lang : langs) {
    out << to_string(lang);
    for (const auto& loss_name : losses) {
      out << "," << fmt4(by_lang[loss_name][lang]);
    }
    if (with_delta) {
      out << "," << fmt4(by_lang["wbce"][lang] - by_lang["bce"][lang]);
    }
    out << "\n";
  }
  out << "all";
  for (const auto& loss_name : losses) {
    out << "," << fmt4(pooled[loss_name]);
  }
  if (with_delta) {
    out << "," << fmt4(pooled["wbce"] - pooled["bce"]);
  }
  out << "\n";

  std::cout << "pooled val macro-F1:";
  for (const auto& loss_name : losses) {
    std::cout << " " << loss_name << "=" << fmt4(pooled[loss_name]);
  }
  if (with_delta) {
    std::cout << " delta(wbce-bce)=" << fmt4(pooled["wbce"] - pooled["bce"]);
  }
  std::cout << "\n";
}

}  // namespace

void register_model_commands(CLI::App& app) {
  auto train_opt = std::make_shared<TrainCmdOptions>();
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train a linear binary-relevance classifier");
  train_cmd->add_option("--train", train_opt->train_path, "Training split")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--val", train_opt->val_path, "Validation split")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--subtask", train_opt->subtask, "detect, type or manifest");
  train_cmd->add_option("--format", train_opt->format, "csv, jsonl or auto");
  train_cmd->add_option("--out", train_opt->out, "Model output path (or prefix for mtl)")
      ->capture_default_str();
  train_cmd->add_option("--log", train_opt->log_path, "Write the per-epoch training log (json)");
  train_cmd->add_option("--mode", train_opt->mode, "independent or mtl")->capture_default_str();
  train_cmd->add_option("--mtl-train", train_opt->mtl_train,
                        "Per-task training split, task=path (repeatable)");
  train_cmd->add_option("--mtl-val", train_opt->mtl_val,
                        "Per-task validation split, task=path (repeatable)");
  train_cmd->add_option("--task-weight", train_opt->task_weights,
                        "Per-task loss weight, task=w (repeatable)");
  train_opt->train.attach(train_cmd);
  train_cmd->callback([train_opt] { run_train(*train_opt); });

  auto predict_opt = std::make_shared<PredictOptions>();
  CLI::App* predict_cmd = app.add_subcommand("predict", "Per-label probabilities for a dataset");
  predict_cmd->add_option("--model", predict_opt->model_path, "Trained model file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--input", predict_opt->input, "Dataset file")
      ->required()
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--format", predict_opt->format, "csv, jsonl or auto");
  predict_cmd->add_option("--out", predict_opt->out, "Probability file (csv or jsonl)")
      ->required();
  predict_cmd->add_option("--source-tag", predict_opt->source_tag,
                          "Source tag recorded in the sidecar manifest");
  predict_cmd->callback([predict_opt] { run_predict(*predict_opt); });

  auto ablate_opt = std::make_shared<AblateOptions>();
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate-loss", "Compare losses under an identical training config");
  ablate_cmd->add_option("--train", ablate_opt->train_path, "Training split")
      ->required()
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--val", ablate_opt->val_path, "Validation split")
      ->required()
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--subtask", ablate_opt->subtask, "detect, type or manifest")
      ->required();
  ablate_cmd->add_option("--format", ablate_opt->format, "csv, jsonl or auto");
  ablate_cmd->add_option("--losses", ablate_opt->losses, "Comma list of losses to compare")
      ->capture_default_str();
  ablate_cmd->add_option("--out", ablate_opt->out, "Comparison table (csv)")
      ->capture_default_str();
  ablate_opt->train.attach(ablate_cmd);
  ablate_cmd->callback([ablate_opt] { run_ablate(*ablate_opt); });
}

}  // namespace polar::cli

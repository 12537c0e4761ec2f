#include <fstream>
#include <iostream>

#include "common.hpp"
#include "polar/eval.hpp"
#include "polar/plots.hpp"

namespace polar::cli {

namespace {

struct EvaluateOptions {
  std::string gold_path;
  std::string pred_path;
  std::string subtask;
  std::string format = "auto";
  std::string scheme = "auto";
  std::string zero_division = "zero";
  std::string posts_path;
  double collapse_floor = 0.05;
  std::string out_prefix;
};

void run_evaluate(const EvaluateOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const LabelMatrix gold =
      load_labels_flexible(opt.gold_path, st, resolve_format(opt.format, opt.gold_path));
  LabelMatrix pred =
      load_labels_flexible(opt.pred_path, st, resolve_format(opt.format, opt.pred_path));

  const MacroScheme scheme =
      opt.scheme == "auto" ? default_scheme(st) : *scheme_from_string(opt.scheme);
  const ZeroDivision zd =
      opt.zero_division == "one" ? ZeroDivision::one : ZeroDivision::zero;

  const EvalReport report = evaluate(gold, pred, scheme, zd);
  std::cout << "macro-F1 (" << to_string(scheme) << ") = " << report.macro << " over "
            << report.rows << " rows\n";
  const auto collapsed = detect_collapse(report, opt.collapse_floor);
  for (const auto& label : collapsed) {
    std::cout << "collapsed label: " << label << "\n";
  }

  if (!opt.out_prefix.empty()) {
    std::ofstream csv_out(opt.out_prefix + ".csv", std::ios::binary);
    if (!csv_out) {
      throw Error(errc::io_failure, "cannot write " + opt.out_prefix + ".csv");
    }
    write_report_csv(report, csv_out);
    write_json_file(report_to_json(report), opt.out_prefix + ".json");
  }

  if (!opt.posts_path.empty()) {
    const Dataset posts = load_dataset(opt.posts_path, st,
                                       resolve_format(opt.format, opt.posts_path));
    const PerLanguageReports reports = per_language_report(gold, pred, posts.posts, zd);
    for (const auto& [lang, lang_report] : reports.by_language) {
      std::cout << "  " << to_string(lang) << ": macro-F1 " << lang_report.macro << "\n";
    }
    if (!opt.out_prefix.empty()) {
      write_json_file(per_language_to_json(reports), opt.out_prefix + "-by-language.json");
    }
  }
}

struct AuditOptions {
  std::string pred_detect;
  std::string pred_type;
  std::string pred_manifest;
  std::string format = "auto";
  std::string out;
};

void run_audit(const AuditOptions& opt) {
  const LabelMatrix detect_pred = load_labels_flexible(
      opt.pred_detect, Subtask::detect, resolve_format(opt.format, opt.pred_detect));
  const LabelMatrix type_pred = load_labels_flexible(
      opt.pred_type, Subtask::type, resolve_format(opt.format, opt.pred_type));
  std::optional<LabelMatrix> manifest_pred;
  if (!opt.pred_manifest.empty()) {
    manifest_pred = load_labels_flexible(opt.pred_manifest, Subtask::manifest,
                                         resolve_format(opt.format, opt.pred_manifest));
  }

  const ConsistencyReport report =
      consistency_audit(detect_pred, type_pred, manifest_pred ? &*manifest_pred : nullptr);
  std::cout << "audited " << report.audited << " posts, " << report.violations
            << " hierarchy violations (rate " << report.rate << ")\n";
  if (!opt.out.empty()) {
    write_json_file(consistency_to_json(report), opt.out);
  }
}

struct GateOptions {
  std::string pred_detect;
  std::string fine;
  std::string fine_subtask;
  std::string kind = "labels";
  std::string format = "auto";
  std::string out;
};

void run_gate(const GateOptions& opt) {
  const LabelMatrix detect_pred = load_labels_flexible(
      opt.pred_detect, Subtask::detect, resolve_format(opt.format, opt.pred_detect));
  const Subtask st = parse_subtask(opt.fine_subtask);
  if (opt.kind == "labels") {
    const LabelMatrix fine =
        load_labels_flexible(opt.fine, st, resolve_format(opt.format, opt.fine));
    save_labels(gate(detect_pred, fine), opt.out, format_for_path(opt.out));
  } else if (opt.kind == "probs") {
    const ProbMatrix fine = load_probs(opt.fine, format_for_path(opt.fine), st);
    save_probs(gate(detect_pred, fine), opt.out, format_for_path(opt.out));
  } else {
    throw Error(errc::bad_config, "--kind must be labels or probs");
  }
  std::cout << "gated predictions -> " << opt.out << "\n";
}

struct ReportOptions {
  std::string gold_path;
  std::string pred_path;
  std::string posts_path;
  std::string subtask;
  std::string format = "auto";
  std::string out_dir = "report";
};

void run_report(const ReportOptions& opt) {
  const Subtask st = parse_subtask(opt.subtask);
  const LabelMatrix gold =
      load_labels_flexible(opt.gold_path, st, resolve_format(opt.format, opt.gold_path));
  const LabelMatrix pred =
      load_labels_flexible(opt.pred_path, st, resolve_format(opt.format, opt.pred_path));
  const Dataset posts =
      load_dataset(opt.posts_path, st, resolve_format(opt.format, opt.posts_path));

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);

  const EvalReport report = evaluate(gold, pred);
  std::ofstream csv_out(dir / "report.csv", std::ios::binary);
  if (!csv_out) {
    throw Error(errc::io_failure, "cannot write report.csv");
  }
  write_report_csv(report, csv_out);
  write_json_file(report_to_json(report), dir / "report.json");
  write_f1_chart(report, dir / "f1.svg");
  write_pr_gap_chart(report, dir / "pr_gap.svg");

  const PerLanguageReports reports = per_language_report(gold, pred, posts.posts);
  write_json_file(per_language_to_json(reports), dir / "by-language.json");
  write_language_chart(reports, dir / "by-language.svg");

  std::cout << "macro-F1 " << report.macro << "; report files in " << opt.out_dir << "\n";
}

}  // namespace

void register_eval_commands(CLI::App& app) {
  auto eval_opt = std::make_shared<EvaluateOptions>();
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold labels");
  eval_cmd->add_option("--gold", eval_opt->gold_path, "Gold labels (label file or dataset)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", eval_opt->pred_path, "Predicted labels")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--subtask", eval_opt->subtask, "detect, type or manifest")->required();
  eval_cmd->add_option("--format", eval_opt->format, "csv, jsonl or auto");
  eval_cmd->add_option("--scheme", eval_opt->scheme,
                       "auto, labelwise or binary_two_class")
      ->capture_default_str();
  eval_cmd->add_option("--zero-division", eval_opt->zero_division, "zero or one")
      ->check(CLI::IsMember({"zero", "one"}))
      ->capture_default_str();
  eval_cmd->add_option("--posts", eval_opt->posts_path,
                       "Dataset file supplying languages for per-language scores");
  eval_cmd->add_option("--collapse-floor", eval_opt->collapse_floor,
                       "F1 floor below which a supported label counts as collapsed")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_opt->out_prefix, "Write <prefix>.csv / <prefix>.json");
  eval_cmd->callback([eval_opt] { run_evaluate(*eval_opt); });

  auto audit_opt = std::make_shared<AuditOptions>();
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Count cross-task hierarchy violations in predictions");
  audit_cmd->add_option("--pred-detect", audit_opt->pred_detect, "Binary predictions")
      ->required()
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--pred-type", audit_opt->pred_type, "Target-type predictions")
      ->required()
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--pred-manifest", audit_opt->pred_manifest,
                        "Manifestation predictions (optional)")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--format", audit_opt->format, "csv, jsonl or auto");
  audit_cmd->add_option("--out", audit_opt->out, "Write the audit report (json)");
  audit_cmd->callback([audit_opt] { run_audit(*audit_opt); });

  auto gate_opt = std::make_shared<GateOptions>();
  CLI::App* gate_cmd = app.add_subcommand(
      "gate", "Zero fine-grained predictions for posts the binary task rejected");
  gate_cmd->add_option("--pred-detect", gate_opt->pred_detect, "Binary predictions")
      ->required()
      ->check(CLI::ExistingFile);
  gate_cmd->add_option("--fine", gate_opt->fine, "Fine-grained labels or probabilities")
      ->required()
      ->check(CLI::ExistingFile);
  gate_cmd->add_option("--fine-subtask", gate_opt->fine_subtask, "type or manifest")->required();
  gate_cmd->add_option("--kind", gate_opt->kind, "labels or probs")->capture_default_str();
  gate_cmd->add_option("--format", gate_opt->format, "csv, jsonl or auto");
  gate_cmd->add_option("--out", gate_opt->out, "Output file")->required();
  gate_cmd->callback([gate_opt] { run_gate(*gate_opt); });

  auto report_opt = std::make_shared<ReportOptions>();
  CLI::App* report_cmd = app.add_subcommand(
      "report", "Evaluation report with per-label and per-language charts");
  report_cmd->add_option("--gold", report_opt->gold_path, "Gold labels")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--pred", report_opt->pred_path, "Predicted labels")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--posts", report_opt->posts_path, "Dataset file with texts/languages")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--subtask", report_opt->subtask, "detect, type or manifest")
      ->required();
  report_cmd->add_option("--format", report_opt->format, "csv, jsonl or auto");
  report_cmd->add_option("--out-dir", report_opt->out_dir, "Report directory")
      ->capture_default_str();
  report_cmd->callback([report_opt] { run_report(*report_opt); });
}

}  // namespace polar::cli

#ifndef POLAR_EVAL_HPP
#define POLAR_EVAL_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polar/corpus.hpp"
#include "polar/prob_matrix.hpp"

namespace polar {

/// What a division by zero in precision/recall/F1 evaluates to. The usual
/// shared-task convention is zero; one is available for sensitivity checks.
enum class ZeroDivision { zero, one };

struct LabelScore {
  std::string label;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t support = 0;  // gold positives
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// True when any of precision/recall/F1 hit a zero denominator.
  bool zero_division_flagged = false;

  double pr_gap() const { return recall - precision; }
};

/// labelwise          - mean of per-label F1 over the subtask's labels.
/// binary_two_class   - mean of F1 over the positive and the negative class
///                      of a single binary label.
enum class MacroScheme { labelwise, binary_two_class };

std::string_view to_string(MacroScheme s);
std::optional<MacroScheme> scheme_from_string(std::string_view name);

/// binary_two_class for the binary subtask, labelwise for the rest.
MacroScheme default_scheme(Subtask st);

/// Confusion counts and precision/recall/F1 for every canonical label.
std::vector<LabelScore> label_prf(const LabelMatrix& gold, const LabelMatrix& pred,
                                  ZeroDivision zd = ZeroDivision::zero);

double macro_f1(const LabelMatrix& gold, const LabelMatrix& pred, MacroScheme scheme,
                ZeroDivision zd = ZeroDivision::zero);

struct EvalReport {
  Subtask subtask = Subtask::detect;
  MacroScheme scheme = MacroScheme::labelwise;
  std::size_t rows = 0;
  std::vector<LabelScore> labels;  // per canonical label (scheme-independent)
  double macro = 0.0;              // macro-F1 under `scheme`
};

EvalReport evaluate(const LabelMatrix& gold, const LabelMatrix& pred, MacroScheme scheme,
                    ZeroDivision zd = ZeroDivision::zero);
EvalReport evaluate(const LabelMatrix& gold, const LabelMatrix& pred);  // default scheme

/// recall - precision per label, in canonical label order. Positive values
/// mark recall-dominant (over-predicting) labels.
std::vector<double> pr_gap(const EvalReport& report);

/// Labels with gold support but F1 below the floor; the signature of a
/// collapsed sparse label.
std::vector<std::string> detect_collapse(const EvalReport& report, double f1_floor = 0.05);

struct PairViolations {
  std::size_t checked = 0;  // posts present in both prediction sets
  std::size_t count = 0;    // binary-negative posts with a positive fine label
  std::vector<std::string> ids;
};

struct ConsistencyReport {
  std::size_t audited = 0;  // binary posts checked against at least one fine task
  std::size_t violations = 0;
  double rate = 0.0;
  std::vector<std::string> ids;  // offending ids, in binary prediction order
  PairViolations detect_vs_type;
  std::optional<PairViolations> detect_vs_manifest;
};

/// Counts hierarchy violations: posts predicted negative by the binary task
/// but positive for at least one fine-grained label. Runs on the id
/// intersection; throws empty_intersection when there is nothing to audit.
ConsistencyReport consistency_audit(const LabelMatrix& detect_pred, const LabelMatrix& type_pred,
                                    const LabelMatrix* manifest_pred = nullptr);

/// Zeroes fine-grained rows whose post the binary task predicted negative.
/// Idempotent; never increases any label's false positives; leaves rows with
/// a positive binary prediction untouched. Ids must match (any order).
LabelMatrix gate(const LabelMatrix& detect_pred, const LabelMatrix& fine);
ProbMatrix gate(const LabelMatrix& detect_pred, const ProbMatrix& fine);

struct PerLanguageReports {
  EvalReport pooled;  // pooled confusion counts, not a mean of per-language F1
  std::map<Lang, EvalReport> by_language;
  std::vector<std::string> warnings;
};

/// Splits rows by the posts' language, scores each bucket and the pool.
/// Every id in the matrices must appear in `posts`.
PerLanguageReports per_language_report(const LabelMatrix& gold, const LabelMatrix& pred,
                                       std::span<const Post> posts,
                                       ZeroDivision zd = ZeroDivision::zero);

// --- serialization ---------------------------------------------------------

/// One row per label: label, tp, fp, fn, tn, support, precision, recall, f1,
/// pr_gap, zero_division_flagged.
void write_report_csv(const EvalReport& report, std::ostream& out);
nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json per_language_to_json(const PerLanguageReports& reports);
nlohmann::json consistency_to_json(const ConsistencyReport& report);

}  // namespace polar

#endif  // POLAR_EVAL_HPP

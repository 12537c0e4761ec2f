#include "polar/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csv.hpp"

namespace polar {

namespace {

using json = nlohmann::json;

void require_aligned(const LabelMatrix& gold, const LabelMatrix& pred) {
  if (gold.subtask() != pred.subtask()) {
    throw Error(errc::subtask_mismatch, "gold is " + std::string(to_string(gold.subtask())) +
                                            ", pred is " + std::string(to_string(pred.subtask())));
  }
  if (gold.rows() != pred.rows() || gold.cols() != pred.cols()) {
    throw Error(errc::shape_mismatch,
                "gold is " + std::to_string(gold.rows()) + "x" + std::to_string(gold.cols()) +
                    ", pred is " + std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()));
  }
  for (std::size_t r = 0; r < gold.rows(); ++r) {
    if (gold.ids()[r] != pred.ids()[r]) {
      throw Error(errc::id_mismatch, "row " + std::to_string(r) + ": gold id '" + gold.ids()[r] +
                                         "' vs pred id '" + pred.ids()[r] + "'");
    }
  }
}

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  bool flagged = false;
};

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, ZeroDivision zd) {
  const double fallback = zd == ZeroDivision::one ? 1.0 : 0.0;
  Prf out;
  if (tp + fp == 0) {
    out.precision = fallback;
    out.flagged = true;
  } else {
    out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    out.recall = fallback;
    out.flagged = true;
  } else {
    out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (out.precision + out.recall == 0.0) {
    out.f1 = fallback;
    out.flagged = true;
  } else {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

/// Maps each id of `ids` to its row index.
std::unordered_map<std::string, std::size_t> index_ids(const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index.emplace(ids[i], i);
  }
  return index;
}

}  // namespace

std::string_view to_string(MacroScheme s) {
  return s == MacroScheme::labelwise ? "labelwise" : "binary_two_class";
}

std::optional<MacroScheme> scheme_from_string(std::string_view name) {
  if (name == "labelwise") return MacroScheme::labelwise;
  if (name == "binary_two_class" || name == "binary-two-class") {
    return MacroScheme::binary_two_class;
  }
  return std::nullopt;
}

MacroScheme default_scheme(Subtask st) {
  return st == Subtask::detect ? MacroScheme::binary_two_class : MacroScheme::labelwise;
}

std::vector<LabelScore> label_prf(const LabelMatrix& gold, const LabelMatrix& pred,
                                  ZeroDivision zd) {
  require_aligned(gold, pred);
  const auto labels = labels_of(gold.subtask());
  std::vector<LabelScore> scores(labels.size());
  for (std::size_t l = 0; l < labels.size(); ++l) {
    LabelScore& s = scores[l];
    s.label = std::string(labels[l]);
    for (std::size_t r = 0; r < gold.rows(); ++r) {
      const bool g = gold.at(r, l) != 0;
      const bool p = pred.at(r, l) != 0;
      s.tp += g && p;
      s.fp += !g && p;
      s.fn += g && !p;
      s.tn += !g && !p;
    }
    s.support = s.tp + s.fn;
    const Prf prf = prf_from_counts(s.tp, s.fp, s.fn, zd);
    s.precision = prf.precision;
    s.recall = prf.recall;
    s.f1 = prf.f1;
    s.zero_division_flagged = prf.flagged;
  }
  return scores;
}

double macro_f1(const LabelMatrix& gold, const LabelMatrix& pred, MacroScheme scheme,
                ZeroDivision zd) {
  if (scheme == MacroScheme::binary_two_class) {
    require_aligned(gold, pred);
    if (gold.cols() != 1) {
      throw Error(errc::shape_mismatch, "binary_two_class applies to a single-label matrix");
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t r = 0; r < gold.rows(); ++r) {
      const bool g = gold.at(r, 0) != 0;
      const bool p = pred.at(r, 0) != 0;
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
      tn += !g && !p;
    }
    const Prf pos = prf_from_counts(tp, fp, fn, zd);
    const Prf neg = prf_from_counts(tn, fn, fp, zd);  // negatives as the positive class
    return 0.5 * (pos.f1 + neg.f1);
  }
  const auto scores = label_prf(gold, pred, zd);
  double sum = 0.0;
  for (const auto& s : scores) {
    sum += s.f1;
  }
  return sum / static_cast<double>(scores.size());
}

EvalReport evaluate(const LabelMatrix& gold, const LabelMatrix& pred, MacroScheme scheme,
                    ZeroDivision zd) {
  EvalReport report;
  report.subtask = gold.subtask();
  report.scheme = scheme;
  report.rows = gold.rows();
  report.labels = label_prf(gold, pred, zd);
  report.macro = macro_f1(gold, pred, scheme, zd);
  return report;
}

EvalReport evaluate(const LabelMatrix& gold, const LabelMatrix& pred) {
  return evaluate(gold, pred, default_scheme(gold.subtask()));
}

std::vector<double> pr_gap(const EvalReport& report) {
  std::vector<double> gaps;
  gaps.reserve(report.labels.size());
  for (const auto& s : report.labels) {
    gaps.push_back(s.pr_gap());
  }
  return gaps;
}

std::vector<std::string> detect_collapse(const EvalReport& report, double f1_floor) {
  std::vector<std::string> collapsed;
  for (const auto& s : report.labels) {
    if (s.support > 0 && s.f1 < f1_floor) {
      collapsed.push_back(s.label);
    }
  }
  return collapsed;
}

ConsistencyReport consistency_audit(const LabelMatrix& detect_pred, const LabelMatrix& type_pred,
                                    const LabelMatrix* manifest_pred) {
  if (detect_pred.subtask() != Subtask::detect || type_pred.subtask() != Subtask::type ||
      (manifest_pred && manifest_pred->subtask() != Subtask::manifest)) {
    throw Error(errc::subtask_mismatch, "audit expects detect, type and optionally manifest");
  }

  const auto type_index = index_ids(type_pred.ids());
  const auto manifest_index =
      manifest_pred ? index_ids(manifest_pred->ids()) : std::unordered_map<std::string, std::size_t>{};

  auto any_positive = [](const LabelMatrix& m, std::size_t row) {
    for (std::size_t l = 0; l < m.cols(); ++l) {
      if (m.at(row, l)) {
        return true;
      }
    }
    return false;
  };

  ConsistencyReport report;
  report.detect_vs_manifest = manifest_pred ? std::make_optional(PairViolations{}) : std::nullopt;

  for (std::size_t r = 0; r < detect_pred.rows(); ++r) {
    const std::string& id = detect_pred.ids()[r];
    const auto t = type_index.find(id);
    const auto m = manifest_pred ? manifest_index.find(id) : manifest_index.end();
    const bool in_type = t != type_index.end();
    const bool in_manifest = manifest_pred && m != manifest_index.end();
    if (!in_type && !in_manifest) {
      continue;
    }
    ++report.audited;
    const bool negative = detect_pred.at(r, 0) == 0;
    bool violated = false;
    if (in_type) {
      ++report.detect_vs_type.checked;
      if (negative && any_positive(type_pred, t->second)) {
        ++report.detect_vs_type.count;
        report.detect_vs_type.ids.push_back(id);
        violated = true;
      }
    }
    if (in_manifest) {
      ++report.detect_vs_manifest->checked;
      if (negative && any_positive(*manifest_pred, m->second)) {
        ++report.detect_vs_manifest->count;
        report.detect_vs_manifest->ids.push_back(id);
        violated = true;
      }
    }
    if (violated) {
      ++report.violations;
      report.ids.push_back(id);
    }
  }

  if (report.audited == 0) {
    throw Error(errc::empty_intersection, "no shared ids between binary and fine predictions");
  }
  report.rate = static_cast<double>(report.violations) / static_cast<double>(report.audited);
  return report;
}

namespace {

/// Row indices of `fine` ids in the binary prediction; throws unless the id
/// sets match exactly.
std::vector<std::size_t> align_to_detect(const LabelMatrix& detect_pred,
                                         const std::vector<std::string>& fine_ids) {
  if (detect_pred.rows() != fine_ids.size()) {
    throw Error(errc::id_mismatch,
                "binary prediction covers " + std::to_string(detect_pred.rows()) +
                    " ids, fine-grained input covers " + std::to_string(fine_ids.size()));
  }
  const auto index = index_ids(detect_pred.ids());
  std::vector<std::size_t> rows;
  rows.reserve(fine_ids.size());
  for (const auto& id : fine_ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error(errc::id_mismatch, "id '" + id + "' missing from binary prediction");
    }
    rows.push_back(it->second);
  }
  return rows;
}

}  // namespace

LabelMatrix gate(const LabelMatrix& detect_pred, const LabelMatrix& fine) {
  if (detect_pred.subtask() != Subtask::detect) {
    throw Error(errc::subtask_mismatch, "gate needs a detect prediction");
  }
  const auto detect_rows = align_to_detect(detect_pred, fine.ids());
  LabelMatrix out = fine;
  for (std::size_t r = 0; r < fine.rows(); ++r) {
    if (detect_pred.at(detect_rows[r], 0) == 0) {
      for (std::size_t l = 0; l < fine.cols(); ++l) {
        out.set(r, l, 0);
      }
    }
  }
  return out;
}

ProbMatrix gate(const LabelMatrix& detect_pred, const ProbMatrix& fine) {
  if (detect_pred.subtask() != Subtask::detect) {
    throw Error(errc::subtask_mismatch, "gate needs a detect prediction");
  }
  const auto detect_rows = align_to_detect(detect_pred, fine.ids);
  ProbMatrix out = fine;
  for (std::size_t r = 0; r < fine.rows(); ++r) {
    if (detect_pred.at(detect_rows[r], 0) == 0) {
      for (std::size_t l = 0; l < fine.cols(); ++l) {
        out.values.at(r, l) = 0.0;
      }
    }
  }
  return out;
}

PerLanguageReports per_language_report(const LabelMatrix& gold, const LabelMatrix& pred,
                                       std::span<const Post> posts, ZeroDivision zd) {
  require_aligned(gold, pred);
  std::unordered_map<std::string, Lang> lang_of;
  lang_of.reserve(posts.size());
  for (const auto& p : posts) {
    lang_of.emplace(p.id, p.lang);
  }

  std::map<Lang, std::vector<std::size_t>> buckets;
  for (std::size_t r = 0; r < gold.rows(); ++r) {
    auto it = lang_of.find(gold.ids()[r]);
    if (it == lang_of.end()) {
      throw Error(errc::unknown_id, gold.ids()[r]);
    }
    buckets[it->second].push_back(r);
  }

  auto submatrix = [](const LabelMatrix& m, const std::vector<std::size_t>& rows) {
    std::vector<std::string> ids;
    std::vector<std::uint8_t> values;
    ids.reserve(rows.size());
    values.reserve(rows.size() * m.cols());
    for (std::size_t r : rows) {
      ids.push_back(m.ids()[r]);
      for (std::size_t l = 0; l < m.cols(); ++l) {
        values.push_back(m.at(r, l));
      }
    }
    return LabelMatrix(m.subtask(), std::move(ids), std::move(values));
  };

  PerLanguageReports out;
  const MacroScheme scheme = default_scheme(gold.subtask());
  out.pooled = evaluate(gold, pred, scheme, zd);
  for (const auto& [lang, rows] : buckets) {
    if (rows.empty()) {
      out.warnings.push_back("language " + std::string(to_string(lang)) + " has no rows");
      continue;
    }
    out.by_language.emplace(lang,
                            evaluate(submatrix(gold, rows), submatrix(pred, rows), scheme, zd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json label_to_json(const LabelScore& s) {
  return json{{"label", s.label},
              {"tp", s.tp},
              {"fp", s.fp},
              {"fn", s.fn},
              {"tn", s.tn},
              {"support", s.support},
              {"precision", s.precision},
              {"recall", s.recall},
              {"f1", s.f1},
              {"pr_gap", s.pr_gap()},
              {"zero_division_flagged", s.zero_division_flagged}};
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& out) {
  csv::write_row(out, {"label", "tp", "fp", "fn", "tn", "support", "precision", "recall", "f1",
                       "pr_gap", "zero_division_flagged"});
  for (const auto& s : report.labels) {
    csv::write_row(out, {s.label, std::to_string(s.tp), std::to_string(s.fp),
                         std::to_string(s.fn), std::to_string(s.tn), std::to_string(s.support),
                         fmt6(s.precision), fmt6(s.recall), fmt6(s.f1), fmt6(s.pr_gap()),
                         s.zero_division_flagged ? "1" : "0"});
  }
}

json report_to_json(const EvalReport& report) {
  json j;
  j["subtask"] = std::string(to_string(report.subtask));
  j["scheme"] = std::string(to_string(report.scheme));
  j["rows"] = report.rows;
  j["macro_f1"] = report.macro;
  j["labels"] = json::array();
  for (const auto& s : report.labels) {
    j["labels"].push_back(label_to_json(s));
  }
  j["collapsed"] = detect_collapse(report);
  return j;
}

json per_language_to_json(const PerLanguageReports& reports) {
  json j;
  j["pooled"] = report_to_json(reports.pooled);
  json langs = json::object();
  for (const auto& [lang, report] : reports.by_language) {
    langs[std::string(to_string(lang))] = report_to_json(report);
  }
  j["by_language"] = langs;
  j["warnings"] = reports.warnings;
  return j;
}

json consistency_to_json(const ConsistencyReport& report) {
  json j;
  j["audited"] = report.audited;
  j["violations"] = report.violations;
  j["rate"] = report.rate;
  j["ids"] = report.ids;
  j["detect_vs_type"] = {{"checked", report.detect_vs_type.checked},
                         {"count", report.detect_vs_type.count},
                         {"ids", report.detect_vs_type.ids}};
  if (report.detect_vs_manifest) {
    j["detect_vs_manifest"] = {{"checked", report.detect_vs_manifest->checked},
                               {"count", report.detect_vs_manifest->count},
                               {"ids", report.detect_vs_manifest->ids}};
  }
  return j;
}

}  // namespace polar

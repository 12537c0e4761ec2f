#include "polar/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "polar/eval.hpp"

namespace polar {

namespace {

using json = nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Row index of every id of `a` in `b`; throws unless the id sets match.
std::vector<std::size_t> align_rows(const ProbMatrix& a, const ProbMatrix& b) {
  if (a.subtask != b.subtask) {
    throw Error(errc::subtask_mismatch, "'" + a.source + "' is " +
                                            std::string(to_string(a.subtask)) + ", '" + b.source +
                                            "' is " + std::string(to_string(b.subtask)));
  }
  if (a.rows() != b.rows()) {
    throw Error(errc::id_mismatch, "'" + a.source + "' has " + std::to_string(a.rows()) +
                                       " rows, '" + b.source + "' has " +
                                       std::to_string(b.rows()));
  }
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(b.rows());
  for (std::size_t i = 0; i < b.ids.size(); ++i) {
    index.emplace(b.ids[i], i);
  }
  std::vector<std::size_t> rows;
  rows.reserve(a.rows());
  for (const auto& id : a.ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error(errc::id_mismatch, "id '" + id + "' missing from '" + b.source + "'");
    }
    rows.push_back(it->second);
  }
  return rows;
}

}  // namespace

void ProbMatrix::validate() const {
  const std::size_t n_labels = labels_of(subtask).size();
  if (values.rows != ids.size() || values.cols != n_labels) {
    throw Error(errc::shape_mismatch,
                "probability matrix is " + std::to_string(values.rows) + "x" +
                    std::to_string(values.cols) + " for " + std::to_string(ids.size()) +
                    " ids and " + std::to_string(n_labels) + " labels");
  }
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(errc::duplicate_id, id);
    }
  }
  for (double v : values.data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(errc::malformed_label, "probability " + std::to_string(v) + " outside [0,1]");
    }
  }
}

void EnsembleConfig::validate(std::size_t n_labels) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(errc::bad_config, "alpha must lie in [0,1]");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(errc::bad_config, "tau must lie in (0,1)");
  }
  if (per_label_tau) {
    if (per_label_tau->size() != n_labels) {
      throw Error(errc::bad_config, "need one per-label threshold per label");
    }
    for (double t : *per_label_tau) {
      if (!(t > 0.0 && t < 1.0)) {
        throw Error(errc::bad_config, "per-label thresholds must lie in (0,1)");
      }
    }
  }
}

ProbMatrix combine(const ProbMatrix& a, const ProbMatrix& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(errc::bad_config, "alpha must lie in [0,1]");
  }
  const auto b_rows = align_rows(a, b);
  ProbMatrix out;
  out.subtask = a.subtask;
  out.ids = a.ids;
  out.source = a.source + "+" + b.source;
  out.values = MatrixD(a.values.rows, a.values.cols);
  for (std::size_t r = 0; r < a.values.rows; ++r) {
    for (std::size_t c = 0; c < a.values.cols; ++c) {
      out.values.at(r, c) = alpha * a.values.at(r, c) + (1.0 - alpha) * b.values.at(b_rows[r], c);
    }
  }
  return out;
}

ProbMatrix combine_k(std::span<const ProbMatrix> sources, std::span<const double> weights) {
  if (sources.empty() || sources.size() != weights.size()) {
    throw Error(errc::bad_config, "need one weight per probability source");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw Error(errc::bad_config, "ensemble weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(errc::bad_config, "ensemble weights must sum to 1");
  }

  ProbMatrix out;
  out.subtask = sources[0].subtask;
  out.ids = sources[0].ids;
  out.values = MatrixD(sources[0].values.rows, sources[0].values.cols);
  out.source = sources[0].source;
  for (std::size_t s = 1; s < sources.size(); ++s) {
    out.source += "+" + sources[s].source;
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto rows = align_rows(sources[0], sources[s]);
    for (std::size_t r = 0; r < out.values.rows; ++r) {
      for (std::size_t c = 0; c < out.values.cols; ++c) {
        out.values.at(r, c) += weights[s] * sources[s].values.at(rows[r], c);
      }
    }
  }
  // guard against rounding drift just past the unit interval
  for (double& v : out.values.data) {
    v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  grid.reserve(21);
  for (int i = 0; i <= 20; ++i) {
    grid.push_back(static_cast<double>(i) * 0.05);
  }
  return grid;
}

AlphaSearchResult grid_search_alpha(const ProbMatrix& a, const ProbMatrix& b,
                                    const LabelMatrix& gold, std::span<const double> grid,
                                    double tau) {
  if (grid.empty()) {
    throw Error(errc::bad_config, "alpha grid is empty");
  }
  EnsembleConfig cfg;
  cfg.tau = tau;
  const MacroScheme scheme = default_scheme(gold.subtask());

  AlphaSearchResult result;
  result.table.reserve(grid.size());
  bool first = true;
  for (double alpha : grid) {
    cfg.alpha = alpha;
    const ProbMatrix mixed = combine(a, b, alpha);
    const double score = macro_f1(gold, apply_threshold(mixed, cfg), scheme);
    result.table.emplace_back(alpha, score);
    const bool better = score > result.best_score ||
                        (score == result.best_score && alpha < result.best_alpha);
    if (first || better) {
      result.best_score = score;
      result.best_alpha = alpha;
      first = false;
    }
  }
  return result;
}

LabelMatrix apply_threshold(const ProbMatrix& p, const EnsembleConfig& cfg) {
  cfg.validate(p.cols());
  LabelMatrix out(p.subtask, p.ids);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) {
      const double threshold = cfg.per_label_tau ? (*cfg.per_label_tau)[c] : cfg.tau;
      out.set(r, c, p.values.at(r, c) >= threshold ? 1 : 0);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// file I/O
// ---------------------------------------------------------------------------

void save_probs(const ProbMatrix& m, const std::filesystem::path& path, FileFormat format) {
  m.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  const auto labels = labels_of(m.subtask);
  if (format == FileFormat::csv) {
    csv::Row header = {"id"};
    for (auto l : labels) {
      header.emplace_back(l);
    }
    csv::write_row(out, header);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      csv::Row row = {m.ids[r]};
      for (std::size_t c = 0; c < m.cols(); ++c) {
        row.push_back(fmt17(m.values.at(r, c)));
      }
      csv::write_row(out, row);
    }
  } else {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json obj;
      obj["id"] = m.ids[r];
      for (std::size_t c = 0; c < m.cols(); ++c) {
        obj[std::string(labels[c])] = m.values.at(r, c);
      }
      out << obj.dump() << '\n';
    }
  }

  json manifest;
  manifest["subtask"] = std::string(to_string(m.subtask));
  manifest["source"] = m.source;
  manifest["rows"] = m.rows();
  manifest["labels"] = json::array();
  for (auto l : labels) {
    manifest["labels"].push_back(std::string(l));
  }
  std::ofstream mout(path.string() + ".manifest.json", std::ios::binary);
  if (!mout) {
    throw Error(errc::io_failure, "cannot write " + path.string() + ".manifest.json");
  }
  mout << manifest.dump(2) << '\n';
}

ProbMatrix load_probs(const std::filesystem::path& path, FileFormat format,
                      std::optional<Subtask> subtask) {
  ProbMatrix m;
  const std::filesystem::path manifest_path = path.string() + ".manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream min(manifest_path, std::ios::binary);
    json manifest = json::parse(min, nullptr, false);
    if (manifest.is_discarded()) {
      throw Error(errc::io_failure, "unreadable manifest " + manifest_path.string());
    }
    auto st = subtask_from_string(manifest.at("subtask").get<std::string>());
    if (!st) {
      throw Error(errc::bad_config, "manifest names unknown subtask");
    }
    if (subtask && *subtask != *st) {
      throw Error(errc::subtask_mismatch, "manifest says " + std::string(to_string(*st)));
    }
    m.subtask = *st;
    m.source = manifest.value("source", path.stem().string());
  } else if (subtask) {
    m.subtask = *subtask;
    m.source = path.stem().string();
  } else {
    throw Error(errc::bad_config,
                "no sidecar manifest at " + manifest_path.string() + "; pass the subtask");
  }

  const auto labels = labels_of(m.subtask);
  std::vector<double> values;

  auto parse_prob = [](const std::string& cell, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !(v >= 0.0 && v <= 1.0)) {
      throw Error(errc::malformed_label,
                  "row " + std::to_string(line) + ": '" + cell + "' is not a probability");
    }
    return v;
  };

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_failure, "cannot open " + path.string());
  }
  if (format == FileFormat::csv) {
    auto rows = csv::parse(in);
    if (rows.empty()) {
      throw Error(errc::missing_column, "empty file " + path.string());
    }
    const auto& header = rows.front();
    if (header.empty() || header[0] != "id") {
      throw Error(errc::missing_column, "id");
    }
    std::vector<int> label_cols(labels.size(), -1);
    for (std::size_t c = 1; c < header.size(); ++c) {
      bool matched = false;
      for (std::size_t l = 0; l < labels.size(); ++l) {
        if (header[c] == labels[l]) {
          label_cols[l] = static_cast<int>(c);
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw Error(errc::unknown_column, "'" + header[c] + "'");
      }
    }
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (label_cols[l] < 0) {
        throw Error(errc::missing_column, std::string(labels[l]));
      }
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != header.size()) {
        throw Error(errc::io_failure, "row " + std::to_string(r + 1) + " is ragged");
      }
      m.ids.push_back(rows[r][0]);
      for (std::size_t l = 0; l < labels.size(); ++l) {
        values.push_back(parse_prob(rows[r][static_cast<std::size_t>(label_cols[l])], r + 1));
      }
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object() || !obj.contains("id")) {
        throw Error(errc::io_failure, "line " + std::to_string(line_no) + " is not a record");
      }
      m.ids.push_back(obj["id"].get<std::string>());
      for (std::size_t l = 0; l < labels.size(); ++l) {
        auto it = obj.find(std::string(labels[l]));
        if (it == obj.end() || !it->is_number()) {
          throw Error(errc::missing_column,
                      std::string(labels[l]) + " (line " + std::to_string(line_no) + ")");
        }
        values.push_back(it->get<double>());
      }
    }
  }

  m.values = MatrixD(m.ids.size(), labels.size());
  m.values.data = std::move(values);
  m.validate();
  return m;
}

}  // namespace polar

#include "polar/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "unicode.hpp"

namespace polar {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, kNumLangs> kLangNames = {
    "amh", "arb", "ben", "deu", "eng", "fas", "hau", "hin", "ita", "khm", "mya",
    "nep", "ori", "pan", "pol", "rus", "spa", "swa", "tel", "tur", "urd", "zho",
};

constexpr std::array<std::string_view, 1> kDetectLabels = {"Polarization"};
constexpr std::array<std::string_view, 5> kTypeLabels = {
    "Political", "Racial/Ethnic", "Religious", "Gender/Sexual", "Other"};
constexpr std::array<std::string_view, 6> kManifestLabels = {
    "Stereotype",       "Vilification",    "Dehumanization",
    "Extreme_Language", "Lack_of_Empathy", "Invalidation"};

const std::array<Lang, 4> kManifestExcluded = {Lang::ita, Lang::pol, Lang::rus, Lang::mya};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Lang lang_from_id_or_throw(const std::string& id) {
  auto us = id.find('_');
  if (us == std::string::npos || us == 0 || us + 1 >= id.size()) {
    throw Error(errc::unknown_language, "id '" + id + "' has no '<lang>_' prefix");
  }
  auto lang = lang_from_string(id.substr(0, us));
  if (!lang) {
    throw Error(errc::unknown_language, "id '" + id + "' has unknown language prefix");
  }
  return *lang;
}

// One parsed input record before validation. A label cell is either 0/1 or
// unlabeled ("--", empty, or a missing JSONL key).
struct RawRecord {
  std::string id;
  std::optional<std::string> lang;
  std::string text;
  std::vector<std::optional<std::uint8_t>> labels;  // canonical order
  bool has_label_columns = false;
  std::size_t line = 0;  // 1-based position in the file, for error messages
};

std::optional<std::uint8_t> parse_label_cell(std::string_view cell, std::size_t line) {
  if (cell.empty() || cell == "--") {
    return std::nullopt;
  }
  if (cell == "0") return std::uint8_t{0};
  if (cell == "1") return std::uint8_t{1};
  throw Error(errc::malformed_label,
              "row " + std::to_string(line) + ": label cell '" + std::string(cell) +
                  "' is not 0, 1 or '--'");
}

std::vector<RawRecord> read_csv_records(const std::filesystem::path& path, Subtask st) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_failure, "cannot open " + path.string());
  }
  auto rows = csv::parse(in);
  if (rows.empty()) {
    throw Error(errc::missing_column, "empty file " + path.string());
  }

  const auto labels = labels_of(st);
  const auto& header = rows.front();
  int id_col = -1, lang_col = -1, text_col = -1;
  std::vector<int> label_cols(labels.size(), -1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = lower(trim(header[c]));
    if (name == "id") {
      id_col = static_cast<int>(c);
    } else if (name == "lang" || name == "language") {
      lang_col = static_cast<int>(c);
    } else if (name == "text") {
      text_col = static_cast<int>(c);
    } else {
      bool matched = false;
      for (std::size_t l = 0; l < labels.size(); ++l) {
        if (name == lower(labels[l])) {
          label_cols[l] = static_cast<int>(c);
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw Error(errc::unknown_column, "'" + header[c] + "' in " + path.string());
      }
    }
  }
  if (id_col < 0) throw Error(errc::missing_column, "id");
  if (text_col < 0) throw Error(errc::missing_column, "text");
  const bool any_label = std::any_of(label_cols.begin(), label_cols.end(),
                                     [](int c) { return c >= 0; });
  if (any_label) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (label_cols[l] < 0) {
        throw Error(errc::missing_column, std::string(labels[l]));
      }
    }
  }

  std::vector<RawRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(errc::io_failure, "row " + std::to_string(r + 1) + " has " +
                                        std::to_string(row.size()) + " fields, expected " +
                                        std::to_string(header.size()));
    }
    RawRecord rec;
    rec.line = r + 1;
    rec.id = row[static_cast<std::size_t>(id_col)];
    if (lang_col >= 0) {
      rec.lang = row[static_cast<std::size_t>(lang_col)];
    }
    rec.text = row[static_cast<std::size_t>(text_col)];
    rec.has_label_columns = any_label;
    if (any_label) {
      rec.labels.resize(labels.size());
      for (std::size_t l = 0; l < labels.size(); ++l) {
        rec.labels[l] = parse_label_cell(row[static_cast<std::size_t>(label_cols[l])], rec.line);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RawRecord> read_jsonl_records(const std::filesystem::path& path, Subtask st) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_failure, "cannot open " + path.string());
  }
  const auto labels = labels_of(st);
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw Error(errc::io_failure, "line " + std::to_string(line_no) + " is not a JSON object");
    }
    RawRecord rec;
    rec.line = line_no;
    if (!obj.contains("id") || !obj["id"].is_string()) {
      throw Error(errc::missing_column, "id (line " + std::to_string(line_no) + ")");
    }
    rec.id = obj["id"].get<std::string>();
    if (obj.contains("lang") && !obj["lang"].is_null()) {
      rec.lang = obj["lang"].get<std::string>();
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw Error(errc::missing_column, "text (line " + std::to_string(line_no) + ")");
    }
    rec.text = obj["text"].get<std::string>();

    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string& key = it.key();
      if (key == "id" || key == "lang" || key == "text") {
        continue;
      }
      bool known = std::any_of(labels.begin(), labels.end(),
                               [&](std::string_view l) { return key == l; });
      if (!known) {
        throw Error(errc::unknown_column, "'" + key + "' (line " + std::to_string(line_no) + ")");
      }
    }
    rec.labels.resize(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l) {
      auto it = obj.find(std::string(labels[l]));
      if (it == obj.end() || it->is_null()) {
        continue;
      }
      rec.has_label_columns = true;
      if (it->is_number_integer()) {
        auto v = it->get<std::int64_t>();
        if (v != 0 && v != 1) {
          throw Error(errc::malformed_label, "row " + std::to_string(line_no) + ": label value " +
                                                 std::to_string(v) + " is not 0 or 1");
        }
        rec.labels[l] = static_cast<std::uint8_t>(v);
      } else if (it->is_string()) {
        rec.labels[l] = parse_label_cell(it->get<std::string>(), line_no);
      } else {
        throw Error(errc::malformed_label,
                    "row " + std::to_string(line_no) + ": label is neither integer nor string");
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

// ---------------------------------------------------------------------------
// enum <-> string
// ---------------------------------------------------------------------------

std::string_view to_string(Lang lang) { return kLangNames[static_cast<std::size_t>(lang)]; }

std::optional<Lang> lang_from_string(std::string_view code) {
  for (std::size_t i = 0; i < kLangNames.size(); ++i) {
    if (kLangNames[i] == code) {
      return static_cast<Lang>(i);
    }
  }
  return std::nullopt;
}

std::span<const Lang> all_langs() {
  static const std::array<Lang, kNumLangs> langs = [] {
    std::array<Lang, kNumLangs> a{};
    for (int i = 0; i < kNumLangs; ++i) a[static_cast<std::size_t>(i)] = static_cast<Lang>(i);
    return a;
  }();
  return langs;
}

std::string_view to_string(Subtask st) {
  switch (st) {
    case Subtask::detect: return "detect";
    case Subtask::type: return "type";
    case Subtask::manifest: return "manifest";
  }
  return "?";
}

std::optional<Subtask> subtask_from_string(std::string_view name) {
  if (name == "detect") return Subtask::detect;
  if (name == "type") return Subtask::type;
  if (name == "manifest") return Subtask::manifest;
  return std::nullopt;
}

std::span<const std::string_view> labels_of(Subtask st) {
  switch (st) {
    case Subtask::detect: return kDetectLabels;
    case Subtask::type: return kTypeLabels;
    case Subtask::manifest: return kManifestLabels;
  }
  return kDetectLabels;
}

bool language_allowed(Subtask st, Lang lang) {
  if (st != Subtask::manifest) {
    return true;
  }
  return std::find(kManifestExcluded.begin(), kManifestExcluded.end(), lang) ==
         kManifestExcluded.end();
}

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::dev: return "dev";
    case Partition::test: return "test";
    case Partition::merged: return "merged";
  }
  return "?";
}

std::optional<Partition> partition_from_string(std::string_view name) {
  if (name == "train") return Partition::train;
  if (name == "dev") return Partition::dev;
  if (name == "test") return Partition::test;
  if (name == "merged") return Partition::merged;
  return std::nullopt;
}

std::string_view to_string(FileFormat f) {
  return f == FileFormat::csv ? "csv" : "jsonl";
}

std::optional<FileFormat> format_from_string(std::string_view name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "jsonl") return FileFormat::jsonl;
  return std::nullopt;
}

FileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FileFormat::csv : FileFormat::jsonl;
}

// ---------------------------------------------------------------------------
// LabelMatrix
// ---------------------------------------------------------------------------

LabelMatrix::LabelMatrix(Subtask st, std::vector<std::string> ids)
    : subtask_(st),
      n_labels_(labels_of(st).size()),
      ids_(std::move(ids)),
      values_(ids_.size() * n_labels_, 0) {}

LabelMatrix::LabelMatrix(Subtask st, std::vector<std::string> ids, std::vector<std::uint8_t> values)
    : subtask_(st), n_labels_(labels_of(st).size()), ids_(std::move(ids)), values_(std::move(values)) {
  if (values_.size() != ids_.size() * n_labels_) {
    throw Error(errc::shape_mismatch,
                "label matrix has " + std::to_string(values_.size()) + " cells for " +
                    std::to_string(ids_.size()) + " ids x " + std::to_string(n_labels_) + " labels");
  }
  for (std::uint8_t v : values_) {
    if (v != 0 && v != 1) {
      throw Error(errc::malformed_label, "matrix entry " + std::to_string(v) + " is not 0/1");
    }
  }
}

void LabelMatrix::set(std::size_t r, std::size_t c, std::uint8_t v) {
  if (v != 0 && v != 1) {
    throw Error(errc::malformed_label, "matrix entry " + std::to_string(v) + " is not 0/1");
  }
  values_[r * n_labels_ + c] = v;
}

std::size_t LabelMatrix::positives(std::size_t label) const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows(); ++r) {
    count += at(r, label);
  }
  return count;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

Dataset load_dataset(const std::filesystem::path& path, Subtask st, FileFormat format,
                     Partition partition) {
  auto records = (format == FileFormat::csv) ? read_csv_records(path, st)
                                             : read_jsonl_records(path, st);

  Dataset d;
  d.subtask = st;
  d.partition = partition;

  std::unordered_set<std::string> seen_ids;
  std::vector<std::uint8_t> gold_values;
  std::size_t labeled_rows = 0;
  std::size_t unlabeled_rows = 0;
  const std::size_t n_labels = labels_of(st).size();

  for (auto& rec : records) {
    if (trim(rec.text).empty()) {
      ++d.dropped_rows;
      continue;
    }
    if (!seen_ids.insert(rec.id).second) {
      throw Error(errc::duplicate_id, rec.id);
    }

    Post post;
    post.id = rec.id;
    post.lang = lang_from_id_or_throw(rec.id);
    if (rec.lang) {
      auto declared = lang_from_string(*rec.lang);
      if (!declared) {
        throw Error(errc::unknown_language, "'" + *rec.lang + "' (row " +
                                                std::to_string(rec.line) + ")");
      }
      if (*declared != post.lang) {
        throw Error(errc::lang_id_mismatch, "id '" + rec.id + "' declares lang '" + *rec.lang +
                                                "'");
      }
    }
    if (!language_allowed(st, post.lang)) {
      throw Error(errc::excluded_language, std::string(to_string(post.lang)) +
                                               " is not annotated for subtask " +
                                               std::string(to_string(st)));
    }
    post.text = uni::nfc(rec.text);

    std::size_t present = 0;
    for (const auto& cell : rec.labels) {
      present += cell.has_value() ? 1u : 0u;
    }
    if (present == n_labels && rec.has_label_columns) {
      ++labeled_rows;
      for (const auto& cell : rec.labels) {
        gold_values.push_back(*cell);
      }
    } else if (present == 0) {
      ++unlabeled_rows;
    } else {
      throw Error(errc::inconsistent_gold,
                  "row " + std::to_string(rec.line) + " is partially labeled");
    }

    d.posts.push_back(std::move(post));
  }

  if (labeled_rows > 0 && unlabeled_rows > 0) {
    throw Error(errc::inconsistent_gold,
                "file mixes " + std::to_string(labeled_rows) + " labeled and " +
                    std::to_string(unlabeled_rows) + " unlabeled rows");
  }
  if (labeled_rows > 0) {
    std::vector<std::string> ids;
    ids.reserve(d.posts.size());
    for (const auto& p : d.posts) {
      ids.push_back(p.id);
    }
    d.gold = LabelMatrix(st, std::move(ids), std::move(gold_values));
  }
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  const auto labels = labels_of(d.subtask);
  if (format == FileFormat::csv) {
    csv::Row header = {"id", "lang", "text"};
    if (d.gold) {
      for (auto l : labels) {
        header.emplace_back(l);
      }
    }
    csv::write_row(out, header);
    for (std::size_t r = 0; r < d.posts.size(); ++r) {
      const Post& p = d.posts[r];
      csv::Row row = {p.id, std::string(to_string(p.lang)), p.text};
      if (d.gold) {
        for (std::size_t l = 0; l < labels.size(); ++l) {
          row.push_back(d.gold->at(r, l) ? "1" : "0");
        }
      }
      csv::write_row(out, row);
    }
  } else {
    for (std::size_t r = 0; r < d.posts.size(); ++r) {
      const Post& p = d.posts[r];
      json obj;
      obj["id"] = p.id;
      obj["lang"] = std::string(to_string(p.lang));
      obj["text"] = p.text;
      if (d.gold) {
        for (std::size_t l = 0; l < labels.size(); ++l) {
          obj[std::string(labels[l])] = static_cast<int>(d.gold->at(r, l));
        }
      }
      out << obj.dump() << '\n';
    }
  }
}

LabelMatrix load_labels(const std::filesystem::path& path, Subtask st, FileFormat format) {
  const auto labels = labels_of(st);
  std::vector<std::string> ids;
  std::vector<std::uint8_t> values;

  auto push_row = [&](const std::string& id, const std::vector<std::optional<std::uint8_t>>& cells,
                      std::size_t line) {
    ids.push_back(id);
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (!cells[l]) {
        throw Error(errc::malformed_label, "row " + std::to_string(line) + ": label '" +
                                               std::string(labels[l]) + "' is missing");
      }
      values.push_back(*cells[l]);
    }
  };

  if (format == FileFormat::csv) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(errc::io_failure, "cannot open " + path.string());
    }
    auto rows = csv::parse(in);
    if (rows.empty()) {
      throw Error(errc::missing_column, "empty file " + path.string());
    }
    const auto& header = rows.front();
    int id_col = -1;
    std::vector<int> label_cols(labels.size(), -1);
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string name = lower(trim(header[c]));
      if (name == "id") {
        id_col = static_cast<int>(c);
        continue;
      }
      bool matched = false;
      for (std::size_t l = 0; l < labels.size(); ++l) {
        if (name == lower(labels[l])) {
          label_cols[l] = static_cast<int>(c);
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw Error(errc::unknown_column, "'" + header[c] + "' in " + path.string());
      }
    }
    if (id_col < 0) throw Error(errc::missing_column, "id");
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (label_cols[l] < 0) throw Error(errc::missing_column, std::string(labels[l]));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != header.size()) {
        throw Error(errc::io_failure, "row " + std::to_string(r + 1) + " has " +
                                          std::to_string(row.size()) + " fields, expected " +
                                          std::to_string(header.size()));
      }
      std::vector<std::optional<std::uint8_t>> cells(labels.size());
      for (std::size_t l = 0; l < labels.size(); ++l) {
        cells[l] = parse_label_cell(row[static_cast<std::size_t>(label_cols[l])], r + 1);
      }
      push_row(row[static_cast<std::size_t>(id_col)], cells, r + 1);
    }
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(errc::io_failure, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        throw Error(errc::io_failure, "line " + std::to_string(line_no) + " is not a JSON object");
      }
      if (!obj.contains("id")) {
        throw Error(errc::missing_column, "id (line " + std::to_string(line_no) + ")");
      }
      std::vector<std::optional<std::uint8_t>> cells(labels.size());
      for (std::size_t l = 0; l < labels.size(); ++l) {
        auto it = obj.find(std::string(labels[l]));
        if (it == obj.end()) {
          throw Error(errc::missing_column,
                      std::string(labels[l]) + " (line " + std::to_string(line_no) + ")");
        }
        if (it->is_number_integer()) {
          auto v = it->get<std::int64_t>();
          if (v != 0 && v != 1) {
            throw Error(errc::malformed_label, "row " + std::to_string(line_no) +
                                                   ": label value " + std::to_string(v));
          }
          cells[l] = static_cast<std::uint8_t>(v);
        } else if (it->is_string()) {
          cells[l] = parse_label_cell(it->get<std::string>(), line_no);
        }
      }
      push_row(obj["id"].get<std::string>(), cells, line_no);
    }
  }

  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(errc::duplicate_id, id);
    }
  }
  return LabelMatrix(st, std::move(ids), std::move(values));
}

void save_labels(const LabelMatrix& m, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(errc::io_failure, "cannot write " + path.string());
  }
  const auto labels = labels_of(m.subtask());
  if (format == FileFormat::csv) {
    csv::Row header = {"id"};
    for (auto l : labels) {
      header.emplace_back(l);
    }
    csv::write_row(out, header);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      csv::Row row = {m.ids()[r]};
      for (std::size_t l = 0; l < labels.size(); ++l) {
        row.push_back(m.at(r, l) ? "1" : "0");
      }
      csv::write_row(out, row);
    }
  } else {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json obj;
      obj["id"] = m.ids()[r];
      for (std::size_t l = 0; l < labels.size(); ++l) {
        obj[std::string(labels[l])] = static_cast<int>(m.at(r, l));
      }
      out << obj.dump() << '\n';
    }
  }
}

LabelMatrix load_labels_flexible(const std::filesystem::path& path, Subtask st,
                                 FileFormat format) {
  bool has_text = false;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(errc::io_failure, "cannot open " + path.string());
  }
  if (format == FileFormat::csv) {
    std::string header_line;
    std::getline(in, header_line);
    std::istringstream hs(header_line);
    auto rows = csv::parse(hs);
    if (!rows.empty()) {
      for (const auto& cell : rows.front()) {
        if (lower(trim(cell)) == "text") {
          has_text = true;
        }
      }
    }
  } else {
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      json obj = json::parse(line, nullptr, false);
      has_text = obj.is_object() && obj.contains("text");
      break;
    }
  }
  in.close();

  if (!has_text) {
    return load_labels(path, st, format);
  }
  Dataset d = load_dataset(path, st, format);
  if (!d.gold) {
    throw Error(errc::no_gold_labels, path.string() + " has no labels");
  }
  return *d.gold;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

StatsReport dataset_stats(const Dataset& d) {
  if (!d.gold) {
    throw Error(errc::no_gold_labels, "dataset_stats requires gold labels");
  }
  const std::size_t n_labels = labels_of(d.subtask).size();

  StatsReport report;
  report.subtask = d.subtask;
  report.total_rows = d.posts.size();
  report.total_positives.assign(n_labels, 0);

  for (std::size_t r = 0; r < d.posts.size(); ++r) {
    Lang lang = d.posts[r].lang;
    auto [it, inserted] = report.positives_per_language.try_emplace(
        lang, std::vector<std::size_t>(n_labels, 0));
    report.rows_per_language[lang] += 1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      std::size_t v = d.gold->at(r, l);
      it->second[l] += v;
      report.total_positives[l] += v;
    }
  }

  for (const auto& [lang, positives] : report.positives_per_language) {
    std::vector<double> rates(n_labels, 0.0);
    double n = static_cast<double>(report.rows_per_language.at(lang));
    for (std::size_t l = 0; l < n_labels; ++l) {
      rates[l] = static_cast<double>(positives[l]) / n;
    }
    report.rates_per_language.emplace(lang, std::move(rates));
  }

  report.rate_summary.resize(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) {
    std::vector<double> rates;
    rates.reserve(report.rates_per_language.size());
    for (const auto& [lang, r] : report.rates_per_language) {
      rates.push_back(r[l]);
    }
    std::sort(rates.begin(), rates.end());
    RateSummary s;
    s.min = rates.front();
    s.max = rates.back();
    std::size_t n = rates.size();
    s.median = (n % 2 == 1) ? rates[n / 2] : 0.5 * (rates[n / 2 - 1] + rates[n / 2]);
    report.rate_summary[l] = s;
  }
  return report;
}

void write_stats_csv(const StatsReport& report, std::ostream& out) {
  const auto labels = labels_of(report.subtask);
  csv::write_row(out, {"lang", "label", "rows", "positives", "positive_rate"});
  char buf[32];
  for (const auto& [lang, positives] : report.positives_per_language) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      std::snprintf(buf, sizeof(buf), "%.6f", report.rates_per_language.at(lang)[l]);
      csv::write_row(out, {std::string(to_string(lang)), std::string(labels[l]),
                           std::to_string(report.rows_per_language.at(lang)),
                           std::to_string(positives[l]), buf});
    }
  }
}

nlohmann::json stats_to_json(const StatsReport& report) {
  const auto labels = labels_of(report.subtask);
  json j;
  j["subtask"] = std::string(to_string(report.subtask));
  j["total_rows"] = report.total_rows;
  json per_lang = json::object();
  for (const auto& [lang, positives] : report.positives_per_language) {
    json entry;
    entry["rows"] = report.rows_per_language.at(lang);
    json pos = json::object();
    json rates = json::object();
    for (std::size_t l = 0; l < labels.size(); ++l) {
      pos[std::string(labels[l])] = positives[l];
      rates[std::string(labels[l])] = report.rates_per_language.at(lang)[l];
    }
    entry["positives"] = pos;
    entry["positive_rate"] = rates;
    per_lang[std::string(to_string(lang))] = entry;
  }
  j["per_language"] = per_lang;
  json summary = json::object();
  for (std::size_t l = 0; l < labels.size(); ++l) {
    const auto& s = report.rate_summary[l];
    summary[std::string(labels[l])] = {
        {"min", s.min}, {"median", s.median}, {"max", s.max},
        {"total_positives", report.total_positives[l]}};
  }
  j["rate_summary"] = summary;
  return j;
}

// ---------------------------------------------------------------------------
// Reference counts
// ---------------------------------------------------------------------------

const std::map<Lang, PartitionCounts>& official_dataset_counts() {
  static const std::map<Lang, PartitionCounts> counts = {
      {Lang::amh, {3332, 166, 1501}}, {Lang::arb, {3380, 169, 1521}},
      {Lang::ben, {3333, 166, 1501}}, {Lang::mya, {2889, 144, 1301}},
      {Lang::zho, {4280, 214, 1927}}, {Lang::eng, {3222, 160, 1452}},
      {Lang::deu, {3180, 159, 1432}}, {Lang::hau, {3651, 182, 1644}},
      {Lang::hin, {2744, 137, 1236}}, {Lang::ita, {3334, 166, 1538}},
      {Lang::khm, {6640, 332, 2988}}, {Lang::nep, {2005, 100, 903}},
      {Lang::ori, {2368, 118, 1066}}, {Lang::fas, {3295, 164, 1484}},
      {Lang::pol, {2391, 119, 1077}}, {Lang::pan, {1700, 100, 809}},
      {Lang::rus, {3348, 167, 1508}}, {Lang::spa, {3305, 165, 1488}},
      {Lang::swa, {6991, 349, 3147}}, {Lang::tel, {2366, 118, 1066}},
      {Lang::tur, {2364, 115, 1093}}, {Lang::urd, {3563, 177, 1606}},
  };
  return counts;
}

std::map<Lang, std::size_t> official_counts_for(Partition p) {
  std::map<Lang, std::size_t> out;
  for (const auto& [lang, c] : official_dataset_counts()) {
    switch (p) {
      case Partition::train: out[lang] = c.train; break;
      case Partition::dev: out[lang] = c.dev; break;
      case Partition::test: out[lang] = c.test; break;
      case Partition::merged: out[lang] = c.total(); break;
    }
  }
  return out;
}

std::vector<CountMismatch> validate_against_reference(
    const Dataset& d, const std::map<Lang, std::size_t>& expected) {
  std::map<Lang, std::size_t> actual;
  for (const auto& p : d.posts) {
    actual[p.lang] += 1;
  }
  std::vector<CountMismatch> mismatches;
  for (const auto& [lang, want] : expected) {
    std::size_t have = actual.count(lang) ? actual.at(lang) : 0;
    if (have != want) {
      mismatches.push_back({lang, want, have});
    }
  }
  for (const auto& [lang, have] : actual) {
    if (!expected.count(lang)) {
      mismatches.push_back({lang, 0, have});
    }
  }
  return mismatches;
}

}  // namespace polar

#ifndef POLAR_CORPUS_HPP
#define POLAR_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polar/errors.hpp"

namespace polar {

// ---------------------------------------------------------------------------
// Languages
// ---------------------------------------------------------------------------

/// The 22 language codes of the official dataset release (ISO-639-3 style).
enum class Lang : std::uint8_t {
  amh, arb, ben, deu, eng, fas, hau, hin, ita, khm, mya,
  nep, ori, pan, pol, rus, spa, swa, tel, tur, urd, zho,
};

inline constexpr int kNumLangs = 22;

std::string_view to_string(Lang lang);
std::optional<Lang> lang_from_string(std::string_view code);
std::span<const Lang> all_langs();

// ---------------------------------------------------------------------------
// Subtasks and canonical label lists
// ---------------------------------------------------------------------------

/// detect   - binary polarization detection (single label).
/// type     - polarization target type (5 non-exclusive labels).
/// manifest - polarization manifestation (6 non-exclusive labels); this
///            subtask is not annotated for ita, pol, rus and mya.
enum class Subtask : std::uint8_t { detect, type, manifest };

std::string_view to_string(Subtask st);
std::optional<Subtask> subtask_from_string(std::string_view name);

/// Canonical label list for a subtask. The order is fixed; every matrix
/// column index in this library refers to this order, and file columns are
/// mapped onto it at load time regardless of their order on disk.
std::span<const std::string_view> labels_of(Subtask st);

/// False for the four languages excluded from the manifestation subtask.
bool language_allowed(Subtask st, Lang lang);

// ---------------------------------------------------------------------------
// Posts and label matrices
// ---------------------------------------------------------------------------

/// One social-media record. `text` is UTF-8, NFC-normalized at load, with
/// emojis preserved byte-exactly. `id` carries the language as a prefix
/// ("<lang>_<hex...>").
struct Post {
  std::string id;
  Lang lang = Lang::eng;
  std::string text;
};

/// Binary gold or predicted labels; rows align with a post id list, columns
/// with the subtask's canonical label list.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(Subtask st, std::vector<std::string> ids);
  LabelMatrix(Subtask st, std::vector<std::string> ids, std::vector<std::uint8_t> values);

  Subtask subtask() const { return subtask_; }
  std::size_t rows() const { return ids_.size(); }
  std::size_t cols() const { return n_labels_; }
  const std::vector<std::string>& ids() const { return ids_; }

  std::uint8_t at(std::size_t r, std::size_t c) const { return values_[r * n_labels_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint8_t v);
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {values_.data() + r * n_labels_, n_labels_};
  }

  /// Column sum (number of positive rows for one label).
  std::size_t positives(std::size_t label) const;

 private:
  Subtask subtask_ = Subtask::detect;
  std::size_t n_labels_ = 1;
  std::vector<std::string> ids_;
  std::vector<std::uint8_t> values_;
};

enum class Partition : std::uint8_t { train, dev, test, merged };

std::string_view to_string(Partition p);
std::optional<Partition> partition_from_string(std::string_view name);

/// Immutable after load; safe to share across threads.
struct Dataset {
  Subtask subtask = Subtask::detect;
  Partition partition = Partition::train;
  std::vector<Post> posts;
  std::optional<LabelMatrix> gold;  // ids match posts in order when present
  std::size_t dropped_rows = 0;     // empty-text rows removed at load

  std::size_t size() const { return posts.size(); }
};

// ---------------------------------------------------------------------------
// Loading and saving
// ---------------------------------------------------------------------------

enum class FileFormat : std::uint8_t { csv, jsonl };

std::string_view to_string(FileFormat f);
std::optional<FileFormat> format_from_string(std::string_view name);
/// Guess from the file extension (.csv / .jsonl), defaulting to jsonl.
FileFormat format_for_path(const std::filesystem::path& path);

/// Loads a dataset file (CSV with header, or JSONL with one object per line).
/// Keys: id, lang (optional; inferred from the id prefix), text, and the
/// subtask's label columns. Label cells must be 0, 1, or "--"/empty for
/// unlabeled rows; a file must be either fully labeled or fully unlabeled.
/// Rows whose text is empty after trimming are dropped and counted in
/// `Dataset::dropped_rows`. Text is NFC-normalized; no lowercasing, no emoji
/// stripping.
Dataset load_dataset(const std::filesystem::path& path, Subtask st, FileFormat format,
                     Partition partition = Partition::train);

/// Inverse of load_dataset: writes id, lang, text (+ label columns when gold
/// is present) in canonical column order.
void save_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format);

/// Label-only files in the official output schema: an id column plus one
/// column per canonical label. Used for gold answer keys and for emitted
/// predictions, which round-trip through this loader losslessly.
LabelMatrix load_labels(const std::filesystem::path& path, Subtask st, FileFormat format);
void save_labels(const LabelMatrix& m, const std::filesystem::path& path, FileFormat format);

/// Accepts either the label-only schema or a full dataset file; in the latter
/// case the gold matrix is extracted.
LabelMatrix load_labels_flexible(const std::filesystem::path& path, Subtask st, FileFormat format);

// ---------------------------------------------------------------------------
// Imbalance statistics
// ---------------------------------------------------------------------------

struct RateSummary {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct StatsReport {
  Subtask subtask = Subtask::detect;
  std::size_t total_rows = 0;
  std::map<Lang, std::size_t> rows_per_language;
  /// positive counts, indexed [language][label].
  std::map<Lang, std::vector<std::size_t>> positives_per_language;
  /// positive rates, indexed [language][label].
  std::map<Lang, std::vector<double>> rates_per_language;
  std::vector<std::size_t> total_positives;      // per label
  std::vector<RateSummary> rate_summary;         // per label, across languages
};

/// Per-language / per-label positive counts and rates, plus the min/median/max
/// positive rate across languages for every label. Requires gold labels.
StatsReport dataset_stats(const Dataset& d);

/// CSV with one row per (language, label) pair.
void write_stats_csv(const StatsReport& report, std::ostream& out);
nlohmann::json stats_to_json(const StatsReport& report);

// ---------------------------------------------------------------------------
// Reference-count validation
// ---------------------------------------------------------------------------

struct PartitionCounts {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  std::size_t total() const { return train + dev + test; }
};

/// Published per-language instance counts of the official dataset release.
const std::map<Lang, PartitionCounts>& official_dataset_counts();

/// Expected per-language row counts for one partition (merged = full total).
std::map<Lang, std::size_t> official_counts_for(Partition p);

struct CountMismatch {
  Lang lang = Lang::eng;
  std::size_t expected = 0;
  std::size_t actual = 0;
};

/// Compares the dataset's per-language row counts against an expected table.
/// Mismatches are returned as data, never thrown; an empty result means the
/// counts match exactly.
std::vector<CountMismatch> validate_against_reference(
    const Dataset& d, const std::map<Lang, std::size_t>& expected);

}  // namespace polar

#endif  // POLAR_CORPUS_HPP

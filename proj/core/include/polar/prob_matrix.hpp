#ifndef POLAR_PROB_MATRIX_HPP
#define POLAR_PROB_MATRIX_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/matrix.hpp"

namespace polar {

/// Per-label posterior probabilities for a list of posts. Rows align with
/// `ids`, columns with the subtask's canonical labels; every entry lies in
/// [0,1]. `source` is a free-form model tag carried through to reports.
struct ProbMatrix {
  Subtask subtask = Subtask::detect;
  std::vector<std::string> ids;
  MatrixD values;
  std::string source;

  std::size_t rows() const { return ids.size(); }
  std::size_t cols() const { return values.cols; }

  /// Throws on out-of-range entries, duplicate ids or a shape that does not
  /// match the subtask's label count.
  void validate() const;
};

/// On-disk format: CSV or JSONL with an id column plus one probability column
/// per canonical label, written with 17 significant digits so values
/// round-trip bit-exactly, plus a `<path>.manifest.json` sidecar recording
/// subtask, source tag and label order.
void save_probs(const ProbMatrix& m, const std::filesystem::path& path, FileFormat format);

/// Reads a probability file. The sidecar manifest supplies subtask and source
/// when present; otherwise `subtask` must be given and the source defaults to
/// the file stem.
ProbMatrix load_probs(const std::filesystem::path& path, FileFormat format,
                      std::optional<Subtask> subtask = std::nullopt);

}  // namespace polar

#endif  // POLAR_PROB_MATRIX_HPP

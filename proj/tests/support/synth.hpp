#ifndef POLAR_TESTS_SYNTH_HPP
#define POLAR_TESTS_SYNTH_HPP

// Deterministic synthetic fixtures shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "polar/corpus.hpp"
#include "polar/prng.hpp"
#include "polar/prob_matrix.hpp"

namespace polar::testing {

/// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string make_id(Lang lang, std::uint64_t n);

/// Uniform random binary matrix with the given positive density.
LabelMatrix random_labels(Subtask st, std::size_t n, Rng& rng, double density = 0.5,
                          Lang lang = Lang::eng);

/// Uniform random probabilities for the given ids.
ProbMatrix random_probs(Subtask st, const std::vector<std::string>& ids, Rng& rng,
                        const std::string& source);

/// Probabilities that threshold exactly to `labels` (0.9 / 0.1).
ProbMatrix probs_for_labels(const LabelMatrix& labels, const std::string& source);

struct SeparableSpec {
  Subtask subtask = Subtask::type;
  std::size_t rows = 200;
  double positive_rate = 0.4;
  std::uint64_t seed = 7;
  /// posts cycle through these languages
  std::vector<Lang> langs = {Lang::eng, Lang::deu, Lang::spa};
  std::uint64_t id_offset = 0;
};

/// Linearly separable corpus: every positive label plants a distinctive
/// signal token in the text, negatives never carry it.
Dataset separable_corpus(const SeparableSpec& spec);

struct ImbalancedSpec {
  Subtask subtask = Subtask::type;
  std::size_t rows = 1200;
  /// per-label positive rates; size must equal the subtask's label count
  std::vector<double> rates = {0.01, 0.02, 0.03, 0.04, 0.05};
  /// fraction of negatives that also carry the signal token, which makes the
  /// unweighted Bayes decision collapse to all-negative
  double noise_rate = 0.08;
  std::uint64_t seed = 11;
};

/// Sparse-label corpus where positives always carry a label's signal token
/// but a slice of negatives does too.
Dataset imbalanced_corpus(const ImbalancedSpec& spec);

/// 1000-row, 6-label corpus whose rarest label has exactly `rare_support`
/// positives; used to compare split quality across seeds.
Dataset rare_label_corpus(std::size_t rows = 1000, std::size_t rare_support = 10,
                          std::uint64_t seed = 5);

}  // namespace polar::testing

#endif  // POLAR_TESTS_SYNTH_HPP

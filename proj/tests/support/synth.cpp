#include "synth.hpp"

#include <cstdio>

namespace polar::testing {

namespace {

/// Tiny word vocabulary for filler text.
std::string noise_word(Rng& rng) {
  static const char* words[] = {"river", "stone", "cloud", "market", "signal", "paper",
                                "window", "garden", "bridge", "copper", "violet", "harbor",
                                "meadow", "lantern", "orbit", "saddle"};
  return words[bounded(rng, std::size(words))];
}

/// Distinctive per-label marker; unique 4-grams, never in the noise words.
std::string signal_token(std::size_t label) {
  return "zzq" + std::to_string(label) + "xx";
}

Dataset finish(Subtask st, std::vector<Post> posts, std::vector<std::uint8_t> values) {
  Dataset d;
  d.subtask = st;
  d.posts = std::move(posts);
  std::vector<std::string> ids;
  ids.reserve(d.posts.size());
  for (const auto& p : d.posts) {
    ids.push_back(p.id);
  }
  d.gold = LabelMatrix(st, std::move(ids), std::move(values));
  return d;
}

}  // namespace

TempDir::TempDir(const std::string& tag) {
  path_ = std::filesystem::temp_directory_path() /
          ("polar_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string make_id(Lang lang, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%08llx", std::string(to_string(lang)).c_str(),
                static_cast<unsigned long long>(n));
  return buf;
}

LabelMatrix random_labels(Subtask st, std::size_t n, Rng& rng, double density, Lang lang) {
  const std::size_t n_labels = labels_of(st).size();
  std::vector<std::string> ids;
  std::vector<std::uint8_t> values;
  ids.reserve(n);
  values.reserve(n * n_labels);
  const std::uint64_t threshold =
      static_cast<std::uint64_t>(density * 1000000.0);
  for (std::size_t r = 0; r < n; ++r) {
    ids.push_back(make_id(lang, r));
    for (std::size_t l = 0; l < n_labels; ++l) {
      values.push_back(bounded(rng, 1000000) < threshold ? 1 : 0);
    }
  }
  return LabelMatrix(st, std::move(ids), std::move(values));
}

ProbMatrix random_probs(Subtask st, const std::vector<std::string>& ids, Rng& rng,
                        const std::string& source) {
  ProbMatrix m;
  m.subtask = st;
  m.ids = ids;
  m.source = source;
  m.values = MatrixD(ids.size(), labels_of(st).size());
  for (double& v : m.values.data) {
    v = static_cast<double>(bounded(rng, 1000001)) / 1000000.0;
  }
  return m;
}

ProbMatrix probs_for_labels(const LabelMatrix& labels, const std::string& source) {
  ProbMatrix m;
  m.subtask = labels.subtask();
  m.ids = labels.ids();
  m.source = source;
  m.values = MatrixD(labels.rows(), labels.cols());
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      m.values.at(r, c) = labels.at(r, c) ? 0.9 : 0.1;
    }
  }
  return m;
}

Dataset separable_corpus(const SeparableSpec& spec) {
  const std::size_t n_labels = labels_of(spec.subtask).size();
  Rng rng(spec.seed);
  std::vector<Post> posts;
  std::vector<std::uint8_t> values;
  posts.reserve(spec.rows);
  const std::uint64_t threshold =
      static_cast<std::uint64_t>(spec.positive_rate * 1000000.0);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    Post p;
    p.lang = spec.langs[r % spec.langs.size()];
    p.id = make_id(p.lang, spec.id_offset + r);
    std::string text = noise_word(rng);
    for (std::size_t l = 0; l < n_labels; ++l) {
      const bool positive = bounded(rng, 1000000) < threshold;
      values.push_back(positive ? 1 : 0);
      if (positive) {
        text += " " + signal_token(l);
      }
    }
    text += " " + noise_word(rng) + " " + noise_word(rng);
    p.text = std::move(text);
    posts.push_back(std::move(p));
  }
  return finish(spec.subtask, std::move(posts), std::move(values));
}

Dataset imbalanced_corpus(const ImbalancedSpec& spec) {
  const std::size_t n_labels = labels_of(spec.subtask).size();
  if (spec.rates.size() != n_labels) {
    throw Error(errc::bad_config, "need one rate per label");
  }
  Rng rng(spec.seed);
  std::vector<Post> posts;
  std::vector<std::uint8_t> values;
  posts.reserve(spec.rows);
  const std::uint64_t noise_threshold =
      static_cast<std::uint64_t>(spec.noise_rate * 1000000.0);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    Post p;
    p.lang = Lang::eng;
    p.id = make_id(p.lang, r);
    std::string text = noise_word(rng);
    for (std::size_t l = 0; l < n_labels; ++l) {
      const auto threshold = static_cast<std::uint64_t>(spec.rates[l] * 1000000.0);
      const bool positive = bounded(rng, 1000000) < threshold;
      values.push_back(positive ? 1 : 0);
      const bool noisy = bounded(rng, 1000000) < noise_threshold;
      if (positive || noisy) {
        text += " " + signal_token(l);
      }
    }
    text += " " + noise_word(rng);
    p.text = std::move(text);
    posts.push_back(std::move(p));
  }
  return finish(spec.subtask, std::move(posts), std::move(values));
}

Dataset rare_label_corpus(std::size_t rows, std::size_t rare_support, std::uint64_t seed) {
  const Subtask st = Subtask::manifest;
  const std::size_t n_labels = labels_of(st).size();  // 6
  Rng rng(seed);
  std::vector<Post> posts;
  std::vector<std::uint8_t> values(rows * n_labels, 0);
  // moderately imbalanced commons, rarest label filled exactly below
  const double rates[] = {0.30, 0.20, 0.12, 0.06, 0.025, 0.0};
  for (std::size_t r = 0; r < rows; ++r) {
    Post p;
    p.lang = Lang::eng;
    p.id = make_id(p.lang, r);
    p.text = noise_word(rng) + " " + noise_word(rng);
    posts.push_back(std::move(p));
    for (std::size_t l = 0; l + 1 < n_labels; ++l) {
      const auto threshold = static_cast<std::uint64_t>(rates[l] * 1000000.0);
      if (bounded(rng, 1000000) < threshold) {
        values[r * n_labels + l] = 1;
      }
    }
  }
  // plant the rare label on a seeded sample of rows
  std::vector<std::size_t> order(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    order[i] = i;
  }
  fisher_yates_shuffle(order, rng);
  for (std::size_t i = 0; i < rare_support && i < rows; ++i) {
    values[order[i] * n_labels + (n_labels - 1)] = 1;
  }
  return finish(st, std::move(posts), std::move(values));
}

}  // namespace polar::testing

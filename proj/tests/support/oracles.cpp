#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polar/prng.hpp"

namespace polar::testing {

BrutePrf brute_prf(const LabelMatrix& gold, const LabelMatrix& pred, std::size_t label) {
  BrutePrf out;
  for (std::size_t r = 0; r < gold.rows(); ++r) {
    const int g = gold.at(r, label);
    const int p = pred.at(r, label);
    if (g == 1 && p == 1) {
      out.tp += 1;
    } else if (g == 0 && p == 1) {
      out.fp += 1;
    } else if (g == 1 && p == 0) {
      out.fn += 1;
    } else {
      out.tn += 1;
    }
  }
  if (out.tp + out.fp > 0) {
    out.precision = static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fp);
  }
  if (out.tp + out.fn > 0) {
    out.recall = static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fn);
  }
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

double brute_macro_f1_labelwise(const LabelMatrix& gold, const LabelMatrix& pred) {
  double sum = 0.0;
  for (std::size_t l = 0; l < gold.cols(); ++l) {
    sum += brute_prf(gold, pred, l).f1;
  }
  return sum / static_cast<double>(gold.cols());
}

double brute_macro_f1_binary(const LabelMatrix& gold, const LabelMatrix& pred) {
  auto invert = [](const LabelMatrix& m) {
    LabelMatrix flipped(m.subtask(), m.ids());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      flipped.set(r, 0, m.at(r, 0) ? 0 : 1);
    }
    return flipped;
  };
  const double pos = brute_prf(gold, pred, 0).f1;
  const double neg = brute_prf(invert(gold), invert(pred), 0).f1;
  return 0.5 * (pos + neg);
}

double central_difference(const std::function<double(double)>& f, double z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

double grad_rel_err(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-30) {
    return 0.0;
  }
  return std::abs(analytic - numeric) / scale;
}

std::vector<std::uint32_t> naive_random_split(std::size_t n, const std::vector<double>& ratios,
                                              std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  fisher_yates_shuffle(order, rng);

  std::vector<std::uint32_t> assignment(n, 0);
  std::size_t cursor = 0;
  double cumulative = 0.0;
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    cumulative += ratios[j];
    const std::size_t end = (j + 1 == ratios.size())
                                ? n
                                : static_cast<std::size_t>(
                                      std::llround(cumulative * static_cast<double>(n)));
    for (; cursor < end && cursor < n; ++cursor) {
      assignment[order[cursor]] = static_cast<std::uint32_t>(j);
    }
  }
  return assignment;
}

double max_proportion_deviation(const LabelMatrix& gold,
                                const std::vector<std::uint32_t>& assignment,
                                std::size_t n_subsets) {
  const std::size_t n = gold.rows();
  const std::size_t n_labels = gold.cols();
  std::vector<std::size_t> sizes(n_subsets, 0);
  std::vector<std::vector<std::size_t>> positives(n_subsets,
                                                  std::vector<std::size_t>(n_labels, 0));
  std::vector<std::size_t> global(n_labels, 0);
  for (std::size_t r = 0; r < n; ++r) {
    sizes[assignment[r]] += 1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      positives[assignment[r]][l] += gold.at(r, l);
      global[l] += gold.at(r, l);
    }
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < n_subsets; ++j) {
    if (sizes[j] == 0) {
      continue;
    }
    for (std::size_t l = 0; l < n_labels; ++l) {
      const double subset_rate =
          static_cast<double>(positives[j][l]) / static_cast<double>(sizes[j]);
      const double global_rate = static_cast<double>(global[l]) / static_cast<double>(n);
      worst = std::max(worst, std::abs(subset_rate - global_rate));
    }
  }
  return worst;
}

}  // namespace polar::testing

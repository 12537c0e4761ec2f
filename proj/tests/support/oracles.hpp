#ifndef POLAR_TESTS_ORACLES_HPP
#define POLAR_TESTS_ORACLES_HPP

// Independent reference implementations used as test oracles. These must not
// call into the library paths they check: scoring is re-derived from scratch
// with explicit confusion counting, gradients come from central finite
// differences, and the split baseline is a plain seeded shuffle.

#include <cstdint>
#include <functional>
#include <vector>

#include "polar/corpus.hpp"

namespace polar::testing {

struct BrutePrf {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Confusion counts and P/R/F1 for one column, counted with explicit loops
/// and the zero-on-empty convention.
BrutePrf brute_prf(const LabelMatrix& gold, const LabelMatrix& pred, std::size_t label);

/// Mean of per-label F1.
double brute_macro_f1_labelwise(const LabelMatrix& gold, const LabelMatrix& pred);

/// Mean of the F1 of the positive and the negative class of a single binary
/// label (the negative class is scored by inverting every cell).
double brute_macro_f1_binary(const LabelMatrix& gold, const LabelMatrix& pred);

/// Central finite difference (f(z+h) - f(z-h)) / 2h.
double central_difference(const std::function<double(double)>& f, double z, double h = 1e-6);

/// Relative gradient error with a floor so that exact zero pairs compare
/// equal.
double grad_rel_err(double analytic, double numeric);

/// Plain seeded random split with no stratification: shuffle indices with the
/// library PRNG contract, then cut at the ratio boundaries. Returns subset
/// assignment per index.
std::vector<std::uint32_t> naive_random_split(std::size_t n, const std::vector<double>& ratios,
                                              std::uint64_t seed);

/// max over subsets and labels of |subset positive proportion - global
/// positive proportion| for an assignment over `gold`.
double max_proportion_deviation(const LabelMatrix& gold,
                                const std::vector<std::uint32_t>& assignment,
                                std::size_t n_subsets);

}  // namespace polar::testing

#endif  // POLAR_TESTS_ORACLES_HPP

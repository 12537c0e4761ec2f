#ifndef POLAR_MATRIX_HPP
#define POLAR_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace polar {

/// Dense row-major matrix of doubles. Deliberately minimal: the library only
/// needs storage, element access and row views.
struct MatrixD {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  MatrixD() = default;
  MatrixD(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool same_shape(const MatrixD& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace polar

#endif  // POLAR_MATRIX_HPP

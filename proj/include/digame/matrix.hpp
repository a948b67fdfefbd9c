#ifndef DIGAME_MATRIX_HPP
#define DIGAME_MATRIX_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace digame {

/// Dense row-major matrix of doubles. Small and value-semantic; the games in
/// this toolkit rarely exceed a few thousand entries.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (double v : row(r)) s += v;
    return s;
  }

  /// Scales row r so it sums to one.
  void normalize_row(std::size_t r) {
    double s = row_sum(r);
    if (s <= 0.0) throw std::domain_error("normalize_row: nonpositive row sum");
    for (double& v : row(r)) v /= s;
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace digame

#endif  // DIGAME_MATRIX_HPP

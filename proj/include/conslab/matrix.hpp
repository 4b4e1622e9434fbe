#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace conslab {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  // y = M x. Throws std::invalid_argument on dimension mismatch.
  std::vector<double> multiply(std::span<const double> x) const;

  bool is_symmetric(double tol = 0.0) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct JacobiOptions {
  double off_diagonal_tol = 1e-12;  // Frobenius norm of the off-diagonal part
  int max_sweeps = 100;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
// ascending. Throws std::invalid_argument for non-square or non-symmetric
// input and std::runtime_error if the sweep limit is hit.
std::vector<double> symmetric_eigenvalues(DenseMatrix a, const JacobiOptions& opts = {});

}  // namespace conslab

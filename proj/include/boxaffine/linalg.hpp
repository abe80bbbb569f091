#pragma once

// Small dense matrices and the symmetric (generalized) eigensolver used by
// the Rayleigh-Ritz module: Cholesky reduction, cyclic Jacobi rotations,
// back-substitution. Internals run in long double.

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace boxaffine {

template <class T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;

double frobenius_norm(const Matrix& m);

/// y = A x.
std::vector<double> multiply(const Matrix& a, const std::vector<double>& x);

/// Lower-triangular L with S = L L^T. Throws NotPositiveDefinite.
Matrix cholesky(const Matrix& s);

struct EigenDecomposition {
  std::vector<double> values;     // ascending
  Matrix vectors;                 // column k belongs to values[k]
  std::vector<double> residuals;  // relative residual per pair
};

/// Standard symmetric eigenproblem by cyclic Jacobi rotations, iterated until
/// the off-diagonal Frobenius norm is below 1e-12 of the matrix norm.
/// Throws NoConvergence after 100 sweeps.
EigenDecomposition jacobi_eigen(const Matrix& a);

/// H v = lambda S v with S symmetric positive definite. Vectors come back
/// S-orthonormal; residuals[k] = |H v - lambda S v| / ((|H|_F + |lambda| |S|_F) |v|).
EigenDecomposition solve_generalized_symmetric(const Matrix& h, const Matrix& s);

/// Row-major CSV with a header row of column indices.
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace boxaffine

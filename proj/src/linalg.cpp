#include "boxaffine/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "boxaffine/error.hpp"

namespace boxaffine {

namespace {

using Wide = long double;
using WideMatrix = BasicMatrix<Wide>;

constexpr int kMaxSweeps = 100;
constexpr Wide kRequiredOffDiagonal = 1e-12L;
// Sweeps continue past the required level while rotations still make
// progress, so small eigenvalues are not limited by the largest ones.
constexpr Wide kTargetOffDiagonal = 1e-17L;

void require_square_symmetric(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be square and non-empty");
  }
  const double scale = std::max(frobenius_norm(m), 1e-300);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!std::isfinite(m(i, j)) || std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " is not symmetric");
      }
    }
  }
}

WideMatrix widen(const Matrix& m) {
  WideMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

WideMatrix wide_cholesky(const WideMatrix& s) {
  const std::size_t n = s.rows();
  WideMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Wide diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0) || !std::isfinite(static_cast<double>(diag))) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(j) + " is not positive");
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      Wide sum = s(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / l(j, j);
    }
  }
  return l;
}

Wide off_diagonal_norm(const WideMatrix& a) {
  Wide sum = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

Wide wide_frobenius(const WideMatrix& a) {
  Wide sum = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// Diagonalizes a in place, accumulating rotations into v.
void cyclic_jacobi(WideMatrix& a, WideMatrix& v) {
  const std::size_t n = a.rows();
  const Wide norm = wide_frobenius(a);
  if (norm == 0) return;
  Wide previous = off_diagonal_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (previous <= kTargetOffDiagonal * norm) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Wide apq = a(p, q);
        if (apq == 0) continue;
        const Wide theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Wide t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Wide c = 1 / std::sqrt(t * t + 1);
        const Wide s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Wide akp = a(k, p);
          const Wide akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Wide apk = a(p, k);
          const Wide aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        for (std::size_t k = 0; k < n; ++k) {
          const Wide vkp = v(k, p);
          const Wide vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    const Wide off = off_diagonal_norm(a);
    // Rounding floor reached: stop once no further progress is possible.
    if (off >= previous && off <= kRequiredOffDiagonal * norm) return;
    previous = off;
  }
  if (off_diagonal_norm(a) > kRequiredOffDiagonal * norm) {
    throw Error(ErrorKind::NoConvergence, "Jacobi rotations exceeded 100 sweeps");
  }
}

// Sorts eigenpairs ascending and narrows to double.
EigenDecomposition sorted_pairs(const WideMatrix& diagonal, const WideMatrix& vectors) {
  const std::size_t n = diagonal.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return diagonal(i, i) < diagonal(j, j); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = static_cast<double>(diagonal(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = static_cast<double>(vectors(i, order[k]));
  }
  return out;
}

double vector_norm(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) sum += m(i, j) * m(i, j);
  return std::sqrt(sum);
}

std::vector<double> multiply(const Matrix& a, const std::vector<double>& x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Wide sum = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) sum += static_cast<Wide>(a(i, j)) * x[j];
    y[i] = static_cast<double>(sum);
  }
  return y;
}

Matrix cholesky(const Matrix& s) {
  require_square_symmetric(s, "S");
  const WideMatrix l = wide_cholesky(widen(s));
  Matrix out(l.rows(), l.cols());
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j < l.cols(); ++j) out(i, j) = static_cast<double>(l(i, j));
  return out;
}

EigenDecomposition jacobi_eigen(const Matrix& a) {
  require_square_symmetric(a, "A");
  WideMatrix work = widen(a);
  WideMatrix v = WideMatrix::identity(a.rows());
  cyclic_jacobi(work, v);
  EigenDecomposition out = sorted_pairs(work, v);
  const double norm = frobenius_norm(a);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const std::vector<double> x = out.vectors.column(k);
    std::vector<double> r = multiply(a, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= out.values[k] * x[i];
    const double denom = (norm + std::abs(out.values[k])) * vector_norm(x);
    out.residuals.push_back(denom > 0.0 ? vector_norm(r) / denom : 0.0);
  }
  return out;
}

EigenDecomposition solve_generalized_symmetric(const Matrix& h, const Matrix& s) {
  require_square_symmetric(h, "H");
  require_square_symmetric(s, "S");
  if (h.rows() != s.rows()) throw Error(ErrorKind::InvalidArgument, "H and S differ in size");
  const std::size_t n = h.rows();
  const WideMatrix l = wide_cholesky(widen(s));
  const WideMatrix hw = widen(h);

  // Y = L^{-1} H, then C = L^{-1} Y^T = L^{-1} H L^{-T}.
  WideMatrix y(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      Wide sum = hw(i, col);
      for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * y(k, col);
      y(i, col) = sum / l(i, i);
    }
  }
  WideMatrix c(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      Wide sum = y(col, i);
      for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * c(k, col);
      c(i, col) = sum / l(i, i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const Wide mean = (c(i, j) + c(j, i)) / 2;
      c(i, j) = mean;
      c(j, i) = mean;
    }
  }

  WideMatrix z = WideMatrix::identity(n);
  cyclic_jacobi(c, z);

  // v = L^{-T} z.
  WideMatrix v(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      Wide sum = z(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) sum -= l(k, ii) * v(k, col);
      v(ii, col) = sum / l(ii, ii);
    }
  }

  EigenDecomposition out = sorted_pairs(c, v);
  const double h_norm = frobenius_norm(h);
  const double s_norm = frobenius_norm(s);
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double> x = out.vectors.column(k);
    std::vector<double> r = multiply(h, x);
    const std::vector<double> sx = multiply(s, x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= out.values[k] * sx[i];
    const double denom = (h_norm + std::abs(out.values[k]) * s_norm) * vector_norm(x);
    out.residuals.push_back(denom > 0.0 ? vector_norm(r) / denom : 0.0);
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  const auto old_precision = out.precision(17);
  for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << j;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace boxaffine

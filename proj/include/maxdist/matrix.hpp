#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "maxdist/errors.hpp"

namespace maxdist {

/// Dense row-major matrix of doubles. Small and value-semantic; the library
/// only ever needs desk-scale dense algebra (model construction, oracles).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  bool operator==(const Matrix& o) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.rows()) throw BadArgumentError("matmul: dimension mismatch");
  Matrix z(x.rows(), y.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int k = 0; k < x.cols(); ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols(); ++j) z(i, j) += xik * y(k, j);
    }
  }
  return z;
}

/// Eigendecomposition of a symmetric matrix: values ascending, vectors stored
/// as columns of an orthogonal matrix.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};

namespace detail {

/// Householder reduction of a symmetric matrix to tridiagonal form, with the
/// accumulated orthogonal transform left in `z` (classic tred2 scheme).
inline void householder_tridiag(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = z.rows();
  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
  }
}

inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

/// Implicit QL iteration with Wilkinson shifts on a tridiagonal matrix,
/// accumulating rotations into `z` (classic tqli scheme).
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) throw BadArgumentError("symmetric eigensolver failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

inline SymEigen sym_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw BadArgumentError("sym_eigen: matrix not square");
  const int n = a.rows();
  SymEigen out;
  out.vectors = a;
  out.values.assign(n, 0.0);
  std::vector<double> e(n, 0.0);
  if (n == 1) {
    out.values[0] = a(0, 0);
    out.vectors = Matrix::identity(1);
    return out;
  }
  detail::householder_tridiag(out.vectors, out.values, e);
  detail::tridiag_ql(out.values, e, out.vectors);
  // Sort eigenpairs ascending for deterministic downstream use.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return out.values[x] < out.values[y]; });
  std::vector<double> dv(n);
  Matrix zv(n, n);
  for (int j = 0; j < n; ++j) {
    dv[j] = out.values[order[j]];
    for (int i = 0; i < n; ++i) zv(i, j) = out.vectors(i, order[j]);
  }
  out.values = std::move(dv);
  out.vectors = std::move(zv);
  return out;
}

/// Unique symmetric PSD square root via spectral decomposition.
///
/// Eigenvalues in [-clip_tol, 0) are treated as rounding noise and clipped to
/// zero; anything below -clip_tol raises NotPSDError. The result is exactly
/// symmetric (upper triangle mirrored).
inline Matrix sym_sqrt_psd(const Matrix& a, double clip_tol = 1e-8, double* min_eigenvalue = nullptr) {
  const SymEigen eig = sym_eigen(a);
  const int n = a.rows();
  const double eig_min = eig.values.front();
  if (min_eigenvalue != nullptr) *min_eigenvalue = eig_min;
  if (eig_min < -clip_tol) throw NotPSDError("matrix eigenvalue below PSD tolerance");
  std::vector<double> root(n);
  for (int k = 0; k < n; ++k) root[k] = eig.values[k] > 0.0 ? std::sqrt(eig.values[k]) : 0.0;
  Matrix t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += eig.vectors(i, k) * root[k] * eig.vectors(j, k);
      t(i, j) = s;
      t(j, i) = s;
    }
  }
  return t;
}

}  // namespace maxdist

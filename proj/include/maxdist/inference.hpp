#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "maxdist/covmodel.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/extremestat.hpp"
#include "maxdist/matrix.hpp"
#include "maxdist/sampling.hpp"

namespace maxdist {

/// Decision record of a threshold test on M_n^2.
struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  double alpha = 0.0;
  int n = 0;
  int p = 0;
  double scale = 8.0;  // the a_p-like scale the threshold used
};

struct PowerPoint {
  ToeplitzSpec spec;
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Critical value q_alpha = -log(32 pi) - 2 log log (1 - alpha)^{-1};
/// identical to the upper limit-law quantile at level alpha.
inline double q_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw BadProbabilityError("alpha must lie in (0, 1)");
  return -std::log(32.0 * std::numbers::pi) - 2.0 * std::log(std::log(1.0 / (1.0 - alpha)));
}

/// Rejection threshold 2p + sqrt(p * ap / 8) * (q_alpha + 8 log n - log log n)
/// / sqrt(2 log n); ap = 8 gives the identity-covariance test.
inline double test_threshold(int n, int p, double alpha, double ap) {
  if (n < 3) throw TooFewRowsError("threshold requires n >= 3");
  if (p < 1) throw BadArgumentError("threshold requires p >= 1");
  if (!(ap > 0.0)) throw BadScaleError("scale a_p must be positive");
  const double ln = std::log(static_cast<double>(n));
  return 2.0 * p + std::sqrt(p * ap / 8.0) * (q_alpha(alpha) + 8.0 * ln - std::log(ln)) /
                       std::sqrt(2.0 * ln);
}

/// Tests H0: Sigma = I against a general alternative by comparing M_n^2 to
/// the Gumbel threshold at level alpha.
inline TestOutcome cov_identity_test(const DataMatrix& x, double alpha) {
  if (x.n < 3) throw TooFewRowsError("cov_identity_test requires n >= 3");
  const double thr = test_threshold(x.n, x.p, alpha, 8.0);
  const double mn2 = max_interpoint_sq(x).dist_sq;
  return {mn2, thr, mn2 >= thr, alpha, x.n, x.p, 8.0};
}

/// Tests H0: no outlier among the rows, with the threshold scaled by a_p of
/// the assumed correlation model.
inline TestOutcome outlier_test(const DataMatrix& x, double alpha, double ap) {
  if (x.n < 3) throw TooFewRowsError("outlier_test requires n >= 3");
  if (!(ap > 0.0)) throw BadScaleError("outlier_test requires a_p > 0");
  const double thr = test_threshold(x.n, x.p, alpha, ap);
  const double mn2 = max_interpoint_sq(x).dist_sq;
  return {mn2, thr, mn2 >= thr, alpha, x.n, x.p, ap};
}

// ---------------------------------------------------------------------------
// Trace estimator T_{2,n} and the plug-in a_p estimate
// ---------------------------------------------------------------------------

namespace detail {

/// Shared accelerated evaluation from a Gram matrix with zeroed diagonal:
/// the three U-statistic terms reduce to the Frobenius norm, row sums, and
/// the grand sum of the hollow Gram matrix.
inline double t2n_from_hollow_gram(const Matrix& a, int n) {
  if (n < 4) throw TooFewRowsError("t2n requires n >= 4");
  double frob2 = 0.0;
  double grand = 0.0;
  double rowsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double si = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = a(i, j);
      frob2 += v * v;
      si += v;
    }
    grand += si;
    rowsq += si * si;
  }
  const double p2 = static_cast<double>(n) * (n - 1);
  const double p3 = p2 * (n - 2);
  const double p4 = p3 * (n - 3);
  const double triples = rowsq - frob2;
  const double quads = grand * grand - 4.0 * rowsq + 2.0 * frob2;
  return frob2 / p2 - 2.0 * triples / p3 + quads / p4;
}

inline Matrix hollow_gram(const DataMatrix& x) {
  Matrix a(x.n, x.n);
  for (int i = 0; i < x.n; ++i) {
    const double* xi = x.row(i);
    for (int j = i + 1; j < x.n; ++j) {
      const double* xj = x.row(j);
      double s = 0.0;
      for (int k = 0; k < x.p; ++k) s += xi[k] * xj[k];
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  return a;
}

}  // namespace detail

/// U-statistic estimator of tr(Sigma^2) (three-term form over inner products
/// X_i' X_j), accelerated to O(n^2 p + n^2). Assumes mean-zero data.
inline double t2n(const DataMatrix& x) {
  return detail::t2n_from_hollow_gram(detail::hollow_gram(x), x.n);
}

/// Same estimator evaluated from a precomputed Gram matrix G = X X'.
inline double t2n_from_gram(const Matrix& gram, int n) {
  Matrix a = gram;
  for (int i = 0; i < n; ++i) a(i, i) = 0.0;
  return detail::t2n_from_hollow_gram(a, n);
}

/// Reference enumeration over all distinct index tuples; O(n^4), intended for
/// cross-checking at small n.
inline double t2n_naive(const DataMatrix& x) {
  if (x.n < 4) throw TooFewRowsError("t2n requires n >= 4");
  const int n = x.n;
  const Matrix a = detail::hollow_gram(x);
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      t1 += a(i, j) * a(i, j);
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        t2 += a(i, j) * a(j, k);
        for (int l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          t3 += a(i, j) * a(k, l);
        }
      }
    }
  const double p2 = static_cast<double>(n) * (n - 1);
  const double p3 = p2 * (n - 2);
  const double p4 = p3 * (n - 3);
  return t1 / p2 - 2.0 * t2 / p3 + t3 / p4;
}

/// Plug-in estimate a_p-hat = (8/p) T_{2,n}.
inline double estimate_ap(const DataMatrix& x) {
  if (x.n < 4) throw TooFewRowsError("estimate_ap requires n >= 4");
  return 8.0 / x.p * t2n(x);
}

/// Outlier test with the scale estimated from the data itself.
inline TestOutcome outlier_test_estimated(const DataMatrix& x, double alpha) {
  if (x.n < 4) throw TooFewRowsError("estimated-scale outlier test requires n >= 4");
  const double ap = estimate_ap(x);
  if (!(ap > 0.0)) throw BadScaleError("estimated a_p is not positive");
  return outlier_test(x, alpha, ap);
}

/// Asymptotic power of the identity test against Sigma = R:
/// beta = 1 - F_xi(sqrt(8/a_p) q_alpha + (sqrt(8/a_p) - 1)(8 log n - log log n)).
/// Equals alpha exactly when a_p = 8, and tends to 1 whenever
/// (log n / p) sum_k r_k^2 (p - k) diverges. Estimators that target
/// tr((Sigma - I)^2) directly reach power 1 under the weaker (n/p) rate, so
/// this test trades efficiency for the closed-form threshold.
inline PowerPoint power_beta(const ToeplitzSpec& spec, int n, double alpha) {
  if (n < 3) throw TooFewRowsError("power_beta requires n >= 3");
  const double qa = q_alpha(alpha);
  const double ap = compute_ap(spec);
  const double ratio = std::sqrt(8.0 / ap);
  const double ln = std::log(static_cast<double>(n));
  const double arg = ratio * qa + (ratio - 1.0) * (8.0 * ln - std::log(ln));
  return {spec, n, alpha, 1.0 - limit_cdf(arg)};
}

}  // namespace maxdist

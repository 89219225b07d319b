#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "maxdist/errors.hpp"
#include "maxdist/matrix.hpp"
#include "maxdist/toeplitz.hpp"

namespace maxdist {

inline constexpr double kPsdTolerance = 1e-8;

/// Decay parameters of the coordinate mixing bound K1 * exp(-K2 * k^gamma).
/// Only gamma enters any computation (through the regime exponent nu).
struct MixingParams {
  double gamma = 1.0;
  double k1 = 2.0;
  double k2 = 1.0;

  void validate() const {
    if (!(gamma > 0.0)) throw BadArgumentError("mixing gamma must be positive");
    if (!(k1 > 1.0)) throw BadArgumentError("mixing K1 must exceed 1");
    if (!(k2 > 0.0)) throw BadArgumentError("mixing K2 must be positive");
  }
};

/// A validated Toeplitz correlation model with its symmetric PSD square root.
struct CovModel {
  ToeplitzSpec spec;
  Matrix R;        // unit diagonal, constant along diagonals
  Matrix T;        // symmetric PSD, T * T == R within tolerance
  double eig_min;  // smallest eigenvalue of R before clipping
};

/// Assembles R and its unique symmetric PSD square root via spectral
/// decomposition. Eigenvalues in [-1e-8, 0) are clipped to zero; anything
/// lower raises NotPSDError.
inline CovModel build_model(const ToeplitzSpec& spec) {
  spec.validate();
  CovModel m;
  m.spec = spec;
  m.R = toeplitz_matrix(spec);
  m.T = sym_sqrt_psd(m.R, kPsdTolerance, &m.eig_min);
  return m;
}

/// Entrywise absolute sum: sum_{i,j} |A_ij|.
inline double entry_abs_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += std::abs(v);
  return s;
}

/// Entrywise square A (.) A.
inline Matrix hadamard_square(const Matrix& a) {
  Matrix out = a;
  for (double& v : out.data()) v *= v;
  return out;
}

/// Gaussian normalization constant a_p = 8 + (16/p) * sum_k r_k^2 (p - k),
/// equivalently (8/p) * ||R^(.2)||.
inline double compute_ap(const ToeplitzSpec& spec) {
  spec.validate();
  const int p = spec.p;
  double s = 0.0;
  for (int k = spec.max_lag(); k >= 1; --k) {
    const double r = spec.r_at(k);
    s += r * r * (p - k);
  }
  return 8.0 + 16.0 / p * s;
}

inline void check_kurtosis_range(double kappa4) {
  if (!(kappa4 >= 1.0 && kappa4 < 5.0)) throw BadKurtosisError("kurtosis must lie in [1, 5)");
}

namespace detail {

/// ||(T^2)^(.2)|| evaluated from R itself (T^2 = R exactly by construction).
inline double norm_r_sq(const CovModel& m) {
  double s = 0.0;
  for (double v : m.R.data()) s += v * v;
  return s;
}

/// ||(T^(.2))^2||.
inline double norm_tsq_sq(const CovModel& m) {
  const Matrix e = hadamard_square(m.T);
  return entry_abs_norm(matmul(e, e));
}

}  // namespace detail

/// Sub-Gaussian normalization constant
/// b_p = p^{-1} (8 ||(T^2)^(.2)|| + 2 (kappa4 - 3) ||(T^(.2))^2||).
/// Reduces to 2 (kappa4 + 1) for R = I and to a_p at kappa4 = 3.
inline double compute_bp(const CovModel& model, double kappa4) {
  check_kurtosis_range(kappa4);
  const double p = model.spec.p;
  const double a = detail::norm_r_sq(model) / p;
  const double b = detail::norm_tsq_sq(model) / p;
  return 2.0 * (4.0 * a + (kappa4 - 3.0) * b);
}

/// Overlap correlation of the limiting pair-feature field,
/// rho_p = (2||(T^2)^(.2)|| + (kappa4-3)||(T^(.2))^2||) / (p * b_p).
/// Lies in [0, 1/3] for kurtosis in [1, 5); equals 1/4 at kappa4 = 3.
inline double compute_rhop(const CovModel& model, double kappa4) {
  check_kurtosis_range(kappa4);
  const double a = detail::norm_r_sq(model);
  const double b = detail::norm_tsq_sq(model);
  const double num = 2.0 * a + (kappa4 - 3.0) * b;
  const double den = 8.0 * a + 2.0 * ((kappa4 - 3.0) * b);
  return num / den;
}

/// Exponent nu = (2 + 4 gamma) / (3 gamma) joined with the floor 7/3.
inline double regime_nu(const MixingParams& mixing) {
  mixing.validate();
  return std::max((2.0 + 4.0 * mixing.gamma) / (3.0 * mixing.gamma), 7.0 / 3.0);
}

/// Finite-sample proxy (log n)^nu / p^{1/9} for the asymptotic regime
/// requirement; values >= 1 flag a configuration far from the regime.
/// Informational only, never an error.
inline double regime_ratio(int n, int p, const MixingParams& mixing) {
  if (n < 3) throw BadArgumentError("regime_ratio requires n >= 3");
  if (p < 1) throw BadArgumentError("regime_ratio requires p >= 1");
  const double nu = regime_nu(mixing);
  return std::pow(std::log(static_cast<double>(n)), nu) / std::pow(static_cast<double>(p), 1.0 / 9.0);
}

}  // namespace maxdist

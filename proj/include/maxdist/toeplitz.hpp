#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "maxdist/errors.hpp"
#include "maxdist/matrix.hpp"

namespace maxdist {

enum class ToeplitzKind { AR1, MDependent, Custom };

/// Specification of a unit-diagonal Toeplitz correlation model R = (r_{|i-j|}).
///
/// AR1 stores the single parameter r (r_k = r^k); MDependent stores r_1..r_m
/// with r_k = 0 past lag m; Custom stores the full sequence r_1..r_{p-1}.
struct ToeplitzSpec {
  ToeplitzKind kind = ToeplitzKind::AR1;
  int p = 1;
  double ar1_r = 0.0;
  std::vector<double> lags;  // unused for AR1

  static ToeplitzSpec ar1(double r, int p) {
    ToeplitzSpec s;
    s.kind = ToeplitzKind::AR1;
    s.ar1_r = r;
    s.p = p;
    s.validate();
    return s;
  }

  static ToeplitzSpec m_dependent(std::vector<double> r, int p) {
    ToeplitzSpec s;
    s.kind = ToeplitzKind::MDependent;
    s.lags = std::move(r);
    s.p = p;
    s.validate();
    return s;
  }

  static ToeplitzSpec custom(std::vector<double> r, int p) {
    ToeplitzSpec s;
    s.kind = ToeplitzKind::Custom;
    s.lags = std::move(r);
    s.p = p;
    s.validate();
    return s;
  }

  void validate() const {
    if (p < 1) throw BadSpecError("dimension p must be positive");
    switch (kind) {
      case ToeplitzKind::AR1:
        if (!(ar1_r >= 0.0 && ar1_r < 1.0)) throw BadSpecError("AR1 requires 0 <= r < 1");
        break;
      case ToeplitzKind::MDependent:
        for (double r : lags)
          if (!(std::abs(r) < 1.0)) throw BadSpecError("m-dependent lags require |r_k| < 1");
        break;
      case ToeplitzKind::Custom:
        if (static_cast<int>(lags.size()) != p - 1)
          throw BadSpecError("custom sequence must supply exactly p-1 lags");
        for (double r : lags)
          if (!(std::abs(r) < 1.0)) throw BadSpecError("custom lags require |r_k| < 1");
        break;
    }
  }

  /// Correlation at lag k >= 0 (r_0 = 1).
  double r_at(int k) const {
    if (k == 0) return 1.0;
    switch (kind) {
      case ToeplitzKind::AR1:
        return std::pow(ar1_r, k);
      case ToeplitzKind::MDependent:
      case ToeplitzKind::Custom:
        return k <= static_cast<int>(lags.size()) ? lags[k - 1] : 0.0;
    }
    return 0.0;
  }

  /// Largest lag with a (possibly) nonzero correlation, capped at p-1.
  int max_lag() const {
    switch (kind) {
      case ToeplitzKind::AR1:
        return ar1_r == 0.0 ? 0 : p - 1;
      case ToeplitzKind::MDependent:
      case ToeplitzKind::Custom:
        return std::min<int>(static_cast<int>(lags.size()), p - 1);
    }
    return 0;
  }

  std::string describe() const {
    switch (kind) {
      case ToeplitzKind::AR1:
        return "ar1(r=" + std::to_string(ar1_r) + ",p=" + std::to_string(p) + ")";
      case ToeplitzKind::MDependent:
        return "mdependent(m=" + std::to_string(lags.size()) + ",p=" + std::to_string(p) + ")";
      case ToeplitzKind::Custom:
        return "custom(p=" + std::to_string(p) + ")";
    }
    return "?";
  }
};

/// Dense p x p correlation matrix of the spec.
inline Matrix toeplitz_matrix(const ToeplitzSpec& spec) {
  spec.validate();
  const int p = spec.p;
  std::vector<double> r(p);
  for (int k = 0; k < p; ++k) r[k] = spec.r_at(k);
  Matrix m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = r[std::abs(i - j)];
  return m;
}

/// out = R * v without materializing R.
///
/// AR1 uses the two-sweep prefix recursion (O(p)); banded sequences cost
/// O(p * m). The generic dense fallback is never needed for the supported
/// kinds since Custom sequences are finite by construction.
inline void toeplitz_apply(const ToeplitzSpec& spec, const double* v, double* out) {
  const int p = spec.p;
  if (spec.kind == ToeplitzKind::AR1) {
    const double r = spec.ar1_r;
    // forward[i] = sum_{j<=i} r^{i-j} v_j, backward mirrored; out = f + b - v.
    double acc = 0.0;
    for (int i = 0; i < p; ++i) {
      acc = v[i] + r * acc;
      out[i] = acc;
    }
    acc = 0.0;
    for (int i = p - 1; i >= 0; --i) {
      acc = v[i] + r * acc;
      out[i] += acc - v[i];
    }
    return;
  }
  const int m = spec.max_lag();
  for (int i = 0; i < p; ++i) {
    double s = v[i];
    const int lo = std::max(0, i - m);
    const int hi = std::min(p - 1, i + m);
    for (int j = lo; j < i; ++j) s += spec.r_at(i - j) * v[j];
    for (int j = i + 1; j <= hi; ++j) s += spec.r_at(j - i) * v[j];
    out[i] = s;
  }
}

/// Spectral density of the correlation sequence in the symmetric real form
/// f(lambda) = (1/pi) * (1 + 2 * sum_{k>=1} r_k cos(k lambda)).
///
/// For AR1 the infinite sum has the closed form
/// (1 - r^2) / (pi * (1 - 2 r cos(lambda) + r^2)).
inline double spectral_density(const ToeplitzSpec& spec, double lambda) {
  spec.validate();
  if (!std::isfinite(lambda)) throw BadArgumentError("spectral_density: lambda must be finite");
  if (spec.kind == ToeplitzKind::AR1) {
    const double r = spec.ar1_r;
    return (1.0 - r * r) / (std::numbers::pi * (1.0 - 2.0 * r * std::cos(lambda) + r * r));
  }
  double s = 1.0;
  for (int k = 1; k <= static_cast<int>(spec.lags.size()); ++k)
    s += 2.0 * spec.lags[k - 1] * std::cos(k * lambda);
  return s / std::numbers::pi;
}

/// Minimum of the spectral density over a uniform grid on [0, pi].
///
/// A nonnegative symbol guarantees every finite Toeplitz section is PSD, which
/// lets the simulation path validate large-p models without a dense
/// eigendecomposition.
inline double min_spectral_density(const ToeplitzSpec& spec, int grid = 4096) {
  if (spec.kind == ToeplitzKind::AR1) {
    // Monotone in cos(lambda); minimum at lambda = pi.
    return spectral_density(spec, std::numbers::pi);
  }
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= grid; ++g) {
    const double lam = std::numbers::pi * g / grid;
    best = std::min(best, spectral_density(spec, lam));
  }
  return best;
}

}  // namespace maxdist

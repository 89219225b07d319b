#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "maxdist/covmodel.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/extremestat.hpp"
#include "maxdist/innovations.hpp"
#include "maxdist/rng.hpp"

namespace maxdist {

/// Overlap of the row sets of two pairs (i,j), (k,l): both rows shared, one
/// shared, or none.
enum class OverlapClass { Identical, ShareOne, Disjoint };

enum class CoordRelation { Same, Cross };

/// Theoretical covariance of two pair features y_{k,(i,j)} = (x_{i,k}-x_{j,k})^2
/// for Gaussian rows, by overlap pattern and coordinate relation:
///   Identical/Same -> 8        Identical/Cross -> 8 r^2
///   ShareOne/Same  -> 2        ShareOne/Cross  -> 2 r^2
///   Disjoint       -> 0
/// where r is the correlation at the coordinate lag.
inline double pair_cov_gaussian(double r_km, OverlapClass overlap, CoordRelation coord) {
  if (overlap == OverlapClass::Disjoint) return 0.0;
  const double base = (overlap == OverlapClass::Identical) ? 8.0 : 2.0;
  if (coord == CoordRelation::Same) return base;
  if (!(std::abs(r_km) < 1.0))
    throw BadPatternError("cross-coordinate pattern requires |r| < 1");
  return base * r_km * r_km;
}

namespace detail {

/// c_{km} = ((T^(.2))^2)_{km} = sum_j T_kj^2 T_mj^2.
inline double c_entry(const Matrix& t, int k, int m) {
  double s = 0.0;
  for (int j = 0; j < t.cols(); ++j) s += t(k, j) * t(k, j) * t(m, j) * t(m, j);
  return s;
}

}  // namespace detail

/// Sub-Gaussian generalization of the pair-feature covariance; the Gaussian
/// values acquire c_{km} (kappa4 - 3) corrections:
///   Identical/Same -> 8 + 2 c_kk (kappa4-3)    Identical/Cross -> 8 r^2 + 2 c_km (kappa4-3)
///   ShareOne/Same  -> 2 + c_kk (kappa4-3)      ShareOne/Cross  -> 2 r^2 + c_km (kappa4-3)
/// Coordinates k, m are 0-based.
inline double pair_cov_subgaussian(const CovModel& model, double kappa4, int k, int m,
                                   OverlapClass overlap) {
  check_kurtosis_range(kappa4);
  const int p = model.spec.p;
  if (k < 0 || m < 0 || k >= p || m >= p) throw BadPatternError("coordinate index out of range");
  if (overlap == OverlapClass::Disjoint) return 0.0;
  const CoordRelation coord = (k == m) ? CoordRelation::Same : CoordRelation::Cross;
  const double r = model.spec.r_at(std::abs(k - m));
  const double c = detail::c_entry(model.T, k, m);
  const double gaussian = pair_cov_gaussian(r, overlap, coord);
  const double weight = (overlap == OverlapClass::Identical) ? 2.0 : 1.0;
  return gaussian + weight * c * (kappa4 - 3.0);
}

/// One Monte Carlo check of a theoretical pair covariance.
struct PairMomentReport {
  OverlapClass overlap = OverlapClass::Identical;
  CoordRelation coord = CoordRelation::Same;
  int lag = 0;
  double theoretical = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  std::size_t draws = 0;
};

/// Estimates the covariance of (y_{k,pair1}, y_{m,pair2}) over independent
/// draws of the required 2-4 rows, with a standard error for the 4-SE
/// acceptance band.
inline PairMomentReport empirical_pair_cov(const CovModel& model, const InnovationSpec& innovation,
                                           OverlapClass overlap, int k, int m, std::size_t draws,
                                           std::uint64_t seed) {
  if (draws < 10000) throw BadArgumentError("empirical_pair_cov requires >= 1e4 draws");
  const int p = model.spec.p;
  if (k < 0 || m < 0 || k >= p || m >= p) throw BadPatternError("coordinate index out of range");
  innovation.validate();

  const int nrows = overlap == OverlapClass::Identical ? 2 : overlap == OverlapClass::ShareOne ? 3 : 4;
  RngStream rng(seed);
  std::vector<double> eps(p), rowbuf(static_cast<std::size_t>(nrows) * p);
  std::vector<double> us(draws), vs(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    for (int rix = 0; rix < nrows; ++rix) {
      for (int j = 0; j < p; ++j) eps[j] = draw_innovation(innovation, rng);
      double* row = rowbuf.data() + static_cast<std::size_t>(rix) * p;
      for (int a = 0; a < p; ++a) {
        double s = 0.0;
        for (int j = 0; j < p; ++j) s += model.T(a, j) * eps[j];
        row[a] = s;
      }
    }
    auto feat = [&](int r1, int r2, int coord_ix) {
      const double diff = rowbuf[static_cast<std::size_t>(r1) * p + coord_ix] -
                          rowbuf[static_cast<std::size_t>(r2) * p + coord_ix];
      return diff * diff;
    };
    us[d] = feat(0, 1, k);
    switch (overlap) {
      case OverlapClass::Identical:
        vs[d] = feat(0, 1, m);
        break;
      case OverlapClass::ShareOne:
        vs[d] = feat(0, 2, m);
        break;
      case OverlapClass::Disjoint:
        vs[d] = feat(2, 3, m);
        break;
    }
  }

  double um = 0.0, vm = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    um += us[d];
    vm += vs[d];
  }
  um /= draws;
  vm /= draws;
  double wsum = 0.0, w2sum = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const double w = (us[d] - um) * (vs[d] - vm);
    wsum += w;
    w2sum += w * w;
  }
  const double cov = wsum / (draws - 1);
  const double wvar = w2sum / draws - (wsum / draws) * (wsum / draws);
  PairMomentReport rep;
  rep.overlap = overlap;
  rep.coord = (k == m) ? CoordRelation::Same : CoordRelation::Cross;
  rep.lag = std::abs(k - m);
  rep.theoretical = pair_cov_subgaussian(model, kurtosis_of(innovation), k, m, overlap);
  rep.empirical = cov;
  rep.se = std::sqrt(wvar / draws);
  rep.draws = draws;
  return rep;
}

// ---------------------------------------------------------------------------
// Poisson-approximation terms
// ---------------------------------------------------------------------------

/// Upper normal tail 1 - Phi(s) via the complementary error function;
/// relative accuracy is that of std::erfc (a few ulp).
inline double normal_upper_tail(double s) { return 0.5 * std::erfc(s / std::numbers::sqrt2); }

/// Poisson-approximation quantities for the exceedance field of pair
/// statistics at threshold s_n = sqrt(4 log n - log log n + x):
///   lambda_p  expected number of exceedances, (n(n-1)/2)(1 - Phi(s_n))
///   u1        neighborhood first-moment bound
///   u2_bound  joint-exceedance bound n^3 (1 - Phi(sqrt(2) s_n / sqrt(1+rho)))
///   lambda_limit  the n -> infinity limit K e^{-x/2}
struct ChenSteinReport {
  long long n = 0;
  double x = 0.0;
  double rho = 0.0;
  double s_n = 0.0;
  double lambda_p = 0.0;
  double u1 = 0.0;
  double u2_bound = 0.0;
  double lambda_limit = 0.0;
};

inline ChenSteinReport chen_stein_terms(long long n, double x, double rho) {
  if (n < 3) throw BadArgumentError("chen_stein_terms requires n >= 3");
  if (!(rho >= 0.0 && rho <= 1.0 / 3.0)) throw BadArgumentError("rho must lie in [0, 1/3]");
  const double ln = std::log(static_cast<double>(n));
  const double s2 = 4.0 * ln - std::log(ln) + x;
  if (!(s2 > 0.0)) throw BadArgumentError("threshold 4 log n - log log n + x must be positive");
  ChenSteinReport rep;
  rep.n = n;
  rep.x = x;
  rep.rho = rho;
  rep.s_n = std::sqrt(s2);
  const double tail = normal_upper_tail(rep.s_n);
  const double npairs = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  rep.lambda_p = npairs * tail;
  rep.u1 = npairs * 2.0 * (static_cast<double>(n) - 2.0) * tail * tail;
  rep.u2_bound = std::pow(static_cast<double>(n), 3.0) *
                 normal_upper_tail(std::numbers::sqrt2 * rep.s_n / std::sqrt(1.0 + rho));
  rep.lambda_limit = kLimitLawK * std::exp(-0.5 * x);
  return rep;
}

/// |lambda_p(n, x) - K e^{-x/2}| along a grid of sample sizes.
inline std::vector<std::pair<long long, double>> lambda_limit_gap(
    const std::vector<long long>& n_grid, double x) {
  std::vector<std::pair<long long, double>> out;
  out.reserve(n_grid.size());
  for (long long n : n_grid) {
    const ChenSteinReport rep = chen_stein_terms(n, x, 0.0);
    out.emplace_back(n, std::abs(rep.lambda_p - rep.lambda_limit));
  }
  return out;
}

}  // namespace maxdist

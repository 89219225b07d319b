#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "maxdist/extremestat.hpp"
#include "maxdist/harness.hpp"
#include "maxdist/rng.hpp"

using namespace maxdist;

namespace {

DataMatrix make_data(int n, int p, const std::vector<double>& vals) {
  DataMatrix x;
  x.n = n;
  x.p = p;
  x.values = vals;
  return x;
}

DataMatrix gaussian_data(int n, int p, std::uint64_t seed) {
  RngStream rng(seed);
  DataMatrix x;
  x.n = n;
  x.p = p;
  x.values.resize(static_cast<std::size_t>(n) * p);
  for (double& v : x.values) v = rng.normal();
  return x;
}

/// Entries on the grid k/16 with |k| <= 31: every pairwise squared distance
/// is then computed without any rounding, so invariance checks can demand
/// bitwise equality.
DataMatrix lattice_data(int n, int p, std::uint64_t seed) {
  RngStream rng(seed);
  DataMatrix x;
  x.n = n;
  x.p = p;
  x.values.resize(static_cast<std::size_t>(n) * p);
  for (double& v : x.values) {
    const int k = static_cast<int>(rng.next_u64() % 63) - 31;
    v = k / 16.0;
  }
  return x;
}

}  // namespace

TEST_CASE("pair index is a lexicographic bijection") {
  for (int n : {2, 3, 5, 17, 40}) {
    const PairIndex h(n);
    std::size_t l = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++l) {
        CHECK(h.index_of(i, j) == l);
        const auto [pi, pj] = h.pair_of(l);
        CHECK(pi == i);
        CHECK(pj == j);
      }
    CHECK(l == h.size());
    CHECK_THROWS_AS(h.pair_of(h.size()), BadArgumentError);
    CHECK_THROWS_AS(h.index_of(1, 1), BadArgumentError);
  }
}

TEST_CASE("max_interpoint_sq on tiny examples") {
  const DataMatrix x = make_data(2, 2, {0.0, 0.0, 3.0, 4.0});
  const FarthestPair far = max_interpoint_sq(x);
  CHECK(far.dist_sq == 25.0);
  CHECK(far.i == 0);
  CHECK(far.j == 1);

  const DataMatrix same = make_data(3, 2, {1.0, 2.0, 1.0, 2.0, 1.0, 2.0});
  CHECK(max_interpoint_sq(same).dist_sq == 0.0);

  CHECK_THROWS_AS(max_interpoint_sq(make_data(1, 2, {0.0, 0.0})), TooFewRowsError);
}

TEST_CASE("ties resolve to the smallest pair index") {
  // Unit square: both diagonals have squared length 2.
  const DataMatrix x = make_data(4, 2, {1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0});
  const FarthestPair far = max_interpoint_sq(x);
  CHECK(far.dist_sq == 2.0);
  CHECK(far.i == 0);  // (0,1) beats (2,3)
  CHECK(far.j == 1);
  const FarthestPair nv = max_interpoint_sq_naive(x);
  CHECK(nv.i == 0);
  CHECK(nv.j == 1);
}

TEST_CASE("blocked kernel equals the naive loop on random instances") {
  RngStream rng(404);
  for (int rep = 0; rep < 15; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 58);
    const int p = 1 + static_cast<int>(rng.uniform01() * 199);
    const DataMatrix x = gaussian_data(n, p, 1000 + rep);
    const FarthestPair a = max_interpoint_sq(x);
    const FarthestPair b = max_interpoint_sq_naive(x);
    CHECK(std::abs(a.dist_sq - b.dist_sq) <= 1e-9 * std::max(1.0, b.dist_sq));
    CHECK(a.i == b.i);
    CHECK(a.j == b.j);
  }
}

TEST_CASE("result is independent of block size and thread count") {
  const DataMatrix x = gaussian_data(53, 37, 2222);
  const FarthestPair ref = max_interpoint_sq(x, 64, 1);
  for (int bs : {1, 7, 64, 1000}) {
    for (int th : {1, 2, 5}) {
      const FarthestPair got = max_interpoint_sq(x, bs, th);
      CHECK(got.dist_sq == ref.dist_sq);
      CHECK(got.i == ref.i);
      CHECK(got.j == ref.j);
    }
  }
}

TEST_CASE("translation invariance is exact on representable data") {
  const DataMatrix x = lattice_data(12, 8, 5150);
  DataMatrix shifted = x;
  const double c[8] = {1000.0, -7.0, 3.0, 0.0, 512.0, -100.0, 9.0, 2.0};
  for (int i = 0; i < shifted.n; ++i)
    for (int k = 0; k < shifted.p; ++k) shifted.at(i, k) += c[k];
  const FarthestPair a = max_interpoint_sq(x);
  const FarthestPair b = max_interpoint_sq(shifted);
  CHECK(a.dist_sq == b.dist_sq);
  CHECK(a.i == b.i);
  CHECK(a.j == b.j);
}

TEST_CASE("permutation invariance of the value is exact on representable data") {
  const DataMatrix x = lattice_data(8, 6, 6001);
  const FarthestPair ref = max_interpoint_sq(x);
  std::vector<int> perm(x.n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    for (int i = x.n - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.next_u64() % (i + 1)]);
    DataMatrix y = x;
    for (int i = 0; i < x.n; ++i)
      for (int k = 0; k < x.p; ++k) y.at(i, k) = x.at(perm[i], k);
    const FarthestPair got = max_interpoint_sq(y);
    CHECK(got.dist_sq == ref.dist_sq);  // the pair may move, the value must not
  }
}

TEST_CASE("appending rows: duplicates never change the value, far points do") {
  const DataMatrix x = lattice_data(10, 5, 31);
  const double before = max_interpoint_sq(x).dist_sq;

  DataMatrix dup = x;
  dup.n += 1;
  for (int k = 0; k < x.p; ++k) dup.values.push_back(x.at(3, k));
  CHECK(max_interpoint_sq(dup).dist_sq == before);

  DataMatrix far = x;
  far.n += 1;
  double maxabs = 0.0;
  for (double v : x.values) maxabs = std::max(maxabs, std::abs(v));
  for (int k = 0; k < x.p; ++k) far.values.push_back(10.0 * (maxabs + 1.0));
  CHECK(max_interpoint_sq(far).dist_sq > before);
}

TEST_CASE("limit law cdf values") {
  CHECK(limit_cdf(0.0) == doctest::Approx(0.905077).epsilon(2e-6));
  CHECK(limit_cdf(100.0) >= 1.0 - 1e-15);
  CHECK_THROWS_AS(limit_cdf(std::numeric_limits<double>::infinity()), BadArgumentError);
  // Strictly increasing on a grid (left end chosen above the double
  // underflow of exp(-K e^{-x/2}), near x = -17.8).
  double prev = limit_cdf(-15.0);
  for (double x = -14.5; x <= 20.0; x += 0.5) {
    const double cur = limit_cdf(x);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("limit quantile: closed values and bisection oracle") {
  CHECK(std::abs(limit_quantile(std::exp(-kLimitLawK))) < 1e-12);

  // Independent oracle: invert limit_cdf by bisection.
  auto bisect = [](double q) {
    double lo = -60.0, hi = 60.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (limit_cdf(mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  for (double q : {0.05, 0.25, 0.5, 0.9, 0.99})
    CHECK(limit_quantile(q) == doctest::Approx(bisect(q)).epsilon(1e-10));
  CHECK(limit_quantile(0.5) == doctest::Approx(-3.8774399475).epsilon(1e-9));

  CHECK_THROWS_AS(limit_quantile(0.0), BadProbabilityError);
  CHECK_THROWS_AS(limit_quantile(1.0), BadProbabilityError);
  CHECK_THROWS_AS(limit_quantile(-0.3), BadProbabilityError);
}

TEST_CASE("cdf/quantile round trip on a grid") {
  for (int i = 1; i <= 99; ++i) {
    const double q = i / 100.0;
    CHECK(std::abs(limit_cdf(limit_quantile(q)) - q) <= 1e-12);
  }
  RngStream rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = -10.0 + 20.0 * rng.uniform01();
    CHECK(limit_quantile(limit_cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("limit_sample distribution and determinism") {
  const auto a = limit_sample(1000, 13);
  const auto b = limit_sample(1000, 13);
  CHECK(a == b);

  const auto big = limit_sample(1000000, 14);
  CHECK(ks_distance(big, [](double v) { return limit_cdf(v); }) <= 0.002);
  std::vector<double> sorted = big;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  CHECK(std::abs(sorted[sorted.size() / 2] - (-3.8775)) <= 0.02);

  CHECK_THROWS_AS(limit_sample(0, 1), BadArgumentError);
}

TEST_CASE("standardize: centering, frozen value, inverse") {
  const Normalization norm = Normalization::make(50, 2000, 8.0);
  // Centered input maps to zero.
  const double centered = 2.0 * 2000 + std::sqrt(2000.0 * 8.0) * norm.mu;
  CHECK(std::abs(standardize(centered, norm)) < 1e-10);
  // Hand-evaluated value of the formula at mn2 = 4500.
  CHECK(standardize(4500.0, norm) == doctest::Approx(1.340954085611152).epsilon(1e-12));

  RngStream rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    const double m = 3000.0 + 3000.0 * rng.uniform01();
    CHECK(destandardize(standardize(m, norm), norm) == doctest::Approx(m).epsilon(1e-10));
  }

  CHECK_THROWS_AS(Normalization::make(2, 10, 8.0), BadArgumentError);
  CHECK_THROWS_AS(Normalization::make(50, 10, 0.0), BadScaleError);
  CHECK_THROWS_AS(Normalization::make(50, 10, -1.0), BadScaleError);
}

TEST_CASE("standardized statistic is strictly increasing in mn2") {
  const Normalization norm = Normalization::make(30, 500, 10.0);
  double prev = standardize(900.0, norm);
  for (double m = 910.0; m <= 1200.0; m += 10.0) {
    const double cur = standardize(m, norm);
    CHECK(cur > prev);
    prev = cur;
  }
}

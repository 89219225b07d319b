#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "maxdist/covmodel.hpp"
#include "maxdist/innovations.hpp"
#include "maxdist/sampling.hpp"

using namespace maxdist;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double kurt = 0.0;
  double kurt_se = 0.0;
};

Moments draw_moments(const InnovationSpec& spec, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = draw_innovation(spec, rng);
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m4 = 0.0, m8 = 0.0;
  for (double v : x) {
    m.var += (v - m.mean) * (v - m.mean);
    const double v4 = v * v * v * v;
    m4 += v4;
    m8 += v4 * v4;
  }
  m.var /= n - 1;
  m4 /= n;
  m8 /= n;
  m.kurt = m4;
  m.kurt_se = std::sqrt((m8 - m4 * m4) / n);
  return m;
}

}  // namespace

TEST_CASE("kurtosis_of exact values") {
  CHECK(kurtosis_of(InnovationSpec::gaussian()) == 3.0);
  CHECK(kurtosis_of(InnovationSpec::rademacher()) == 1.0);
  CHECK(kurtosis_of(InnovationSpec::uniform()) == 9.0 / 5.0);
  CHECK(kurtosis_of(InnovationSpec::three_point(4.5)) == 4.5);
  CHECK_THROWS_AS(InnovationSpec::three_point(0.5), BadKurtosisError);
  CHECK_THROWS_AS(InnovationSpec::three_point(5.0), BadKurtosisError);
}

TEST_CASE("innovation moments over a million draws") {
  const std::size_t big = 1000000;
  int seed = 100;
  for (const InnovationSpec& spec :
       {InnovationSpec::gaussian(), InnovationSpec::rademacher(), InnovationSpec::uniform(),
        InnovationSpec::three_point(4.5)}) {
    const Moments m = draw_moments(spec, big, static_cast<std::uint64_t>(seed++));
    CHECK(std::abs(m.mean) <= 4.0 / std::sqrt(static_cast<double>(big)));
    CHECK(m.var == doctest::Approx(1.0).epsilon(0.01));
    const double se = std::max(m.kurt_se, 1e-12);  // Rademacher fourth moment is constant
    CHECK(std::abs(m.kurt - kurtosis_of(spec)) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("three-point law hits its support exactly") {
  const InnovationSpec spec = InnovationSpec::three_point(4.0);
  RngStream rng(7);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) {
    const double v = draw_innovation(spec, rng);
    const bool ok = v == 0.0 || v == 2.0 || v == -2.0;
    if (!ok) FAIL("unexpected support point");
    zeros += v == 0.0 ? 1 : 0;
  }
  // P(0) = 1 - 1/kappa4 = 0.75.
  CHECK(zeros > 7200);
  CHECK(zeros < 7800);
}

TEST_CASE("sample is deterministic and seed-sensitive") {
  const CovModel model = build_model(ToeplitzSpec::ar1(0.4, 6));
  const DataMatrix a = sample(model, InnovationSpec::gaussian(), 9, 42);
  const DataMatrix b = sample(model, InnovationSpec::gaussian(), 9, 42);
  const DataMatrix c = sample(model, InnovationSpec::gaussian(), 9, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.n == 9);
  CHECK(a.p == 6);
}

TEST_CASE("substreams of one master seed are decorrelated") {
  const std::size_t big = 200000;
  RngStream a = RngStream::substream(77, 1);
  RngStream b = RngStream::substream(77, 2);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < big; ++i) {
    const double x = a.normal();
    const double y = b.normal();
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double corr = sab / std::sqrt(saa * sbb);
  CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(big)));

  // Distinct purposes give distinct streams even at the same index.
  RngStream c = RngStream::substream(77, 1, 5);
  RngStream d = RngStream::substream(77, 1, 6);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("rows are individually reproducible substreams") {
  const CovModel model = build_model(ToeplitzSpec::ar1(0.4, 5));
  const DataMatrix small = sample(model, InnovationSpec::gaussian(), 3, 42);
  const DataMatrix large = sample(model, InnovationSpec::gaussian(), 10, 42);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 5; ++k) CHECK(small.at(i, k) == large.at(i, k));
}

TEST_CASE("sample mean shift is exactly additive") {
  const CovModel model = build_model(ToeplitzSpec::ar1(0.3, 4));
  const std::vector<double> mean = {10.0, -3.5, 0.25, 1024.0};
  const DataMatrix base = sample(model, InnovationSpec::uniform(), 7, 5);
  const DataMatrix shifted = sample(model, InnovationSpec::uniform(), 7, mean, 5);
  for (int i = 0; i < 7; ++i)
    for (int k = 0; k < 4; ++k) CHECK(shifted.at(i, k) == base.at(i, k) + mean[k]);
}

TEST_CASE("sample argument validation") {
  const CovModel model = build_model(ToeplitzSpec::ar1(0.3, 4));
  CHECK_THROWS_AS(sample(model, InnovationSpec::gaussian(), 0, 1), BadArgumentError);
  CHECK_THROWS_AS(sample(model, InnovationSpec::gaussian(), 5, {1.0, 2.0}, 1), BadArgumentError);
  const DataMatrix one = sample(model, InnovationSpec::gaussian(), 1, 1);
  CHECK(one.n == 1);
}

TEST_CASE("sample covariance matches the model: identity") {
  const int p = 4;
  const int n = 100000;
  const CovModel model = build_model(ToeplitzSpec::ar1(0.0, p));
  const DataMatrix x = sample(model, InnovationSpec::gaussian(), n, 2024);
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      double cov = 0.0;
      for (int i = 0; i < n; ++i) cov += x.at(i, a) * x.at(i, b);
      cov /= n;
      const double expect = a == b ? 1.0 : 0.0;
      const double se = a == b ? std::sqrt(2.0 / n) : std::sqrt(1.0 / n);
      CHECK(std::abs(cov - expect) <= 4.0 * se);
    }
}

TEST_CASE("sample covariance matches the model: AR1(0.5)") {
  const int n = 100000;
  const CovModel model = build_model(ToeplitzSpec::ar1(0.5, 3));
  const DataMatrix x = sample(model, InnovationSpec::gaussian(), n, 31415);
  double c01 = 0.0, v0 = 0.0, v1 = 0.0;
  for (int i = 0; i < n; ++i) {
    c01 += x.at(i, 0) * x.at(i, 1);
    v0 += x.at(i, 0) * x.at(i, 0);
    v1 += x.at(i, 1) * x.at(i, 1);
  }
  const double corr = c01 / std::sqrt(v0 * v1);
  const double se = (1.0 - 0.25) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(corr - 0.5) <= 4.0 * se);
}

TEST_CASE("non-Gaussian innovations still produce covariance R") {
  const int n = 100000;
  const CovModel model = build_model(ToeplitzSpec::ar1(0.5, 3));
  const DataMatrix x = sample(model, InnovationSpec::rademacher(), n, 999);
  double c01 = 0.0;
  for (int i = 0; i < n; ++i) c01 += x.at(i, 0) * x.at(i, 1);
  c01 /= n;
  CHECK(std::abs(c01 - 0.5) <= 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("csv round trip") {
  const CovModel model = build_model(ToeplitzSpec::ar1(0.6, 5));
  const DataMatrix x = sample(model, InnovationSpec::gaussian(), 8, 77);
  std::stringstream ss;
  write_csv(x, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "x1,x2,x3,x4,x5");
  ss.seekg(0);
  const DataMatrix y = read_csv(ss);
  CHECK(y.n == x.n);
  CHECK(y.p == x.p);
  CHECK(y.values == x.values);  // 17 significant digits round-trip exactly
}

TEST_CASE("csv reader accepts headerless numeric input and rejects garbage") {
  {
    std::stringstream ss("1,2,3\n4,5,6\n");
    const DataMatrix x = read_csv(ss);
    CHECK(x.n == 2);
    CHECK(x.p == 3);
    CHECK(x.at(1, 2) == 6.0);
  }
  {
    std::stringstream ss("x1,x2\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ss), DataError);
  }
  {
    std::stringstream ss("x1,x2\n1,abc\n");
    CHECK_THROWS_AS(read_csv(ss), DataError);
  }
  {
    std::stringstream ss("");
    CHECK_THROWS_AS(read_csv(ss), DataError);
  }
}

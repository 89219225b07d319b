#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

#include "maxdist/errors.hpp"
#include "maxdist/matrix.hpp"
#include "maxdist/rng.hpp"
#include "maxdist/sampling.hpp"

namespace maxdist {

/// Lexicographic bijection between ordered pairs (i, j), 0 <= i < j < n, and
/// flat indices 0 .. n(n-1)/2 - 1.
struct PairIndex {
  int n = 0;

  explicit PairIndex(int n_) : n(n_) {
    if (n < 2) throw BadArgumentError("PairIndex requires n >= 2");
  }

  std::size_t size() const { return static_cast<std::size_t>(n) * (n - 1) / 2; }

  std::size_t index_of(int i, int j) const {
    if (!(0 <= i && i < j && j < n)) throw BadArgumentError("PairIndex: need 0 <= i < j < n");
    return static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
  }

  std::pair<int, int> pair_of(std::size_t l) const {
    if (l >= size()) throw BadArgumentError("PairIndex: flat index out of range");
    // Closed-form row, then a fixup loop guards against rounding.
    const double nd = n;
    int i = static_cast<int>(nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(l)));
    i = std::max(0, std::min(i, n - 2));
    while (i > 0 && index_of(i, i + 1) > l) --i;
    while (i < n - 2 && index_of(i + 1, i + 2) <= l) ++i;
    const int j = static_cast<int>(l - index_of(i, i + 1)) + i + 1;
    return {i, j};
  }
};

/// Maximizing pair of the squared interpoint distance; indices are 0-based
/// with i < j, and ties resolve to the smallest flat pair index.
struct FarthestPair {
  double dist_sq = 0.0;
  int i = 0;
  int j = 1;
};

namespace detail {

inline void consider(FarthestPair& best, double d, int i, int j, const PairIndex& h) {
  if (d > best.dist_sq ||
      (d == best.dist_sq && h.index_of(i, j) < h.index_of(best.i, best.j))) {
    best = {d, i, j};
  }
}

inline FarthestPair merge_best(const FarthestPair& a, const FarthestPair& b, const PairIndex& h) {
  if (b.dist_sq > a.dist_sq) return b;
  if (b.dist_sq == a.dist_sq && h.index_of(b.i, b.j) < h.index_of(a.i, a.j)) return b;
  return a;
}

}  // namespace detail

/// Reference O(n^2 p) evaluation by direct coordinate differences.
inline FarthestPair max_interpoint_sq_naive(const DataMatrix& x) {
  if (x.n < 2) throw TooFewRowsError("pairwise statistic requires n >= 2");
  const PairIndex h(x.n);
  FarthestPair best{-1.0, 0, 1};
  for (int i = 0; i < x.n; ++i) {
    const double* xi = x.row(i);
    for (int j = i + 1; j < x.n; ++j) {
      const double* xj = x.row(j);
      double d = 0.0;
      for (int k = 0; k < x.p; ++k) {
        const double diff = xi[k] - xj[k];
        d += diff * diff;
      }
      detail::consider(best, d, i, j, h);
    }
  }
  return best;
}

/// Largest pair value of a Gram matrix: max_{i<j} G_ii + G_jj - 2 G_ij.
inline FarthestPair max_pair_from_gram(const Matrix& g) {
  const int n = g.rows();
  if (n < 2) throw TooFewRowsError("pairwise statistic requires n >= 2");
  const PairIndex h(n);
  FarthestPair best{-1.0, 0, 1};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      detail::consider(best, g(i, i) + g(j, j) - 2.0 * g(i, j), i, j, h);
  return best;
}

/// Blocked Gram-identity evaluation of M_n^2 = max_{i<j} |X_i - X_j|^2.
///
/// Rows are first centered on row 0 (pair values are translation invariant,
/// and centering keeps the G_ii + G_jj - 2 G_ij cancellation well
/// conditioned). The (i < j) triangle is scanned in blocks; with threads > 1
/// the block rows are partitioned and partial winners merged under the same
/// value-then-pair-index order, so the result does not depend on the thread
/// count or block size.
inline FarthestPair max_interpoint_sq(const DataMatrix& x, int block_size = 64, int threads = 1) {
  if (x.n < 2) throw TooFewRowsError("pairwise statistic requires n >= 2");
  if (block_size < 1) throw BadArgumentError("block size must be positive");
  const int n = x.n;
  const int p = x.p;
  const PairIndex h(n);

  std::vector<double> z(static_cast<std::size_t>(n) * p);
  const double* x0 = x.row(0);
  for (int i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    double* zi = z.data() + static_cast<std::size_t>(i) * p;
    for (int k = 0; k < p; ++k) zi[k] = xi[k] - x0[k];
  }
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) {
    const double* zi = z.data() + static_cast<std::size_t>(i) * p;
    double s = 0.0;
    for (int k = 0; k < p; ++k) s += zi[k] * zi[k];
    sq[i] = s;
  }

  const int nblocks = (n + block_size - 1) / block_size;
  auto scan_block_rows = [&](int bi_begin, int bi_end) {
    FarthestPair best{-1.0, 0, 1};
    for (int bi = bi_begin; bi < bi_end; ++bi) {
      const int i0 = bi * block_size;
      const int i1 = std::min(n, i0 + block_size);
      for (int bj = bi; bj < nblocks; ++bj) {
        const int j0 = bj * block_size;
        const int j1 = std::min(n, j0 + block_size);
        for (int i = i0; i < i1; ++i) {
          const double* zi = z.data() + static_cast<std::size_t>(i) * p;
          for (int j = std::max(j0, i + 1); j < j1; ++j) {
            const double* zj = z.data() + static_cast<std::size_t>(j) * p;
            double dot = 0.0;
            for (int k = 0; k < p; ++k) dot += zi[k] * zj[k];
            detail::consider(best, sq[i] + sq[j] - 2.0 * dot, i, j, h);
          }
        }
      }
    }
    return best;
  };

  if (threads <= 1 || nblocks <= 1) return scan_block_rows(0, nblocks);

  const int nworkers = std::min(threads, nblocks);
  std::vector<FarthestPair> partial(nworkers, FarthestPair{-1.0, 0, 1});
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  for (int w = 0; w < nworkers; ++w) {
    pool.emplace_back([&, w] {
      FarthestPair best{-1.0, 0, 1};
      for (int bi = w; bi < nblocks; bi += nworkers)
        best = detail::merge_best(best, scan_block_rows(bi, bi + 1), h);
      partial[w] = best;
    });
  }
  for (auto& t : pool) t.join();
  FarthestPair best = partial[0];
  for (int w = 1; w < nworkers; ++w) best = detail::merge_best(best, partial[w], h);
  return best;
}

// ---------------------------------------------------------------------------
// Limit law and normalization
// ---------------------------------------------------------------------------

/// Constant K = 1/(4 sqrt(2 pi)) of the limiting Gumbel-type law
/// F(x) = exp(-K e^{-x/2}).
inline const double kLimitLawK = 1.0 / (4.0 * std::sqrt(2.0 * std::numbers::pi));

inline double limit_cdf(double x) {
  if (!std::isfinite(x)) throw BadArgumentError("limit_cdf: x must be finite");
  return std::exp(-kLimitLawK * std::exp(-0.5 * x));
}

inline double limit_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw BadProbabilityError("limit_quantile: q must lie in (0, 1)");
  return -2.0 * std::log(-std::log(q) / kLimitLawK);
}

/// i.i.d. draws from the limit law by inverse-CDF of a seeded uniform stream.
inline std::vector<double> limit_sample(std::size_t count, std::uint64_t seed) {
  if (count < 1) throw BadArgumentError("limit_sample: count must be >= 1");
  RngStream rng(seed);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = limit_quantile(rng.uniform_open01());
  return out;
}

/// Centering and scale of the standardized statistic
/// W = 4 sqrt(log n) ((M_n^2 - 2p) / sqrt(p * scale) - mu),
/// with mu = 2 sqrt(log n) - log log n / (4 sqrt(log n)).
struct Normalization {
  int n = 3;
  int p = 1;
  double scale = 8.0;
  double mu = 0.0;

  static Normalization make(int n, int p, double scale) {
    if (n < 3) throw BadArgumentError("normalization requires n >= 3");
    if (p < 1) throw BadArgumentError("normalization requires p >= 1");
    if (!(scale > 0.0)) throw BadScaleError("normalization scale must be positive");
    const double ln = std::log(static_cast<double>(n));
    Normalization nm;
    nm.n = n;
    nm.p = p;
    nm.scale = scale;
    nm.mu = 2.0 * std::sqrt(ln) - std::log(ln) / (4.0 * std::sqrt(ln));
    return nm;
  }
};

inline double standardize(double mn2, const Normalization& norm) {
  const double ln = std::log(static_cast<double>(norm.n));
  return 4.0 * std::sqrt(ln) * ((mn2 - 2.0 * norm.p) / std::sqrt(norm.p * norm.scale) - norm.mu);
}

inline double destandardize(double w, const Normalization& norm) {
  const double ln = std::log(static_cast<double>(norm.n));
  return 2.0 * norm.p + std::sqrt(norm.p * norm.scale) * (w / (4.0 * std::sqrt(ln)) + norm.mu);
}

}  // namespace maxdist

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "maxdist/covmodel.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/innovations.hpp"
#include "maxdist/rng.hpp"

namespace maxdist {

struct Provenance {
  std::uint64_t seed = 0;
  std::string model_id;
  std::string innovation_id;
};

/// n x p sample, rows are observations.
struct DataMatrix {
  int n = 0;
  int p = 0;
  std::vector<double> values;  // row-major
  Provenance prov;

  double& at(int i, int k) { return values[static_cast<std::size_t>(i) * p + k]; }
  double at(int i, int k) const { return values[static_cast<std::size_t>(i) * p + k]; }
  const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * p; }
  double* row(int i) { return values.data() + static_cast<std::size_t>(i) * p; }
};

namespace detail {
inline constexpr std::uint64_t kPurposeRow = 0x726F77ULL;  // row draws
}

/// Draws n i.i.d. rows X_i = mean + T * eps_i.
///
/// Row i consumes only the substream (seed, i), so output is bit-identical for
/// identical arguments and rows are individually reproducible. The same path
/// serves the Gaussian and general sub-Gaussian cases; for Gaussian
/// innovations X is exactly N(mean, R) in distribution.
inline DataMatrix sample(const CovModel& model, const InnovationSpec& innovation, int n,
                         const std::vector<double>& mean, std::uint64_t seed) {
  if (n < 1) throw BadArgumentError("sample requires n >= 1");
  innovation.validate();
  const int p = model.spec.p;
  if (!mean.empty() && static_cast<int>(mean.size()) != p)
    throw BadArgumentError("mean vector length must equal p");
  DataMatrix x;
  x.n = n;
  x.p = p;
  x.values.assign(static_cast<std::size_t>(n) * p, 0.0);
  x.prov = {seed, model.spec.describe(), innovation.describe()};
  std::vector<double> eps(p);
  for (int i = 0; i < n; ++i) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(i), detail::kPurposeRow);
    for (int k = 0; k < p; ++k) eps[k] = draw_innovation(innovation, rng);
    double* out = x.row(i);
    for (int k = 0; k < p; ++k) {
      double s = 0.0;
      for (int j = 0; j < p; ++j) s += model.T(k, j) * eps[j];
      out[k] = s;
    }
    if (!mean.empty())
      for (int k = 0; k < p; ++k) out[k] += mean[k];
  }
  return x;
}

/// Convenience overload with zero mean.
inline DataMatrix sample(const CovModel& model, const InnovationSpec& innovation, int n,
                         std::uint64_t seed) {
  return sample(model, innovation, n, {}, seed);
}

/// Writes `x1,...,xp` header plus one observation per line, 17 significant
/// digits so a round trip is value-exact.
inline void write_csv(const DataMatrix& x, std::ostream& os) {
  for (int k = 0; k < x.p; ++k) os << (k ? ",x" : "x") << (k + 1);
  os << '\n';
  char buf[40];
  for (int i = 0; i < x.n; ++i) {
    for (int k = 0; k < x.p; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", x.at(i, k));
      if (k) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

inline void write_csv_file(const DataMatrix& x, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  write_csv(x, os);
}

inline DataMatrix read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty data file");
  DataMatrix x;
  // Header row gives p; alternatively accept a headerless numeric first row.
  std::vector<double> first;
  {
    std::stringstream ss(line);
    std::string cell;
    bool header = false;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || (end && *end != '\0' && *end != '\r')) {
        header = true;
        break;
      }
      first.push_back(v);
    }
    if (header) {
      std::stringstream sh(line);
      int cols = 0;
      while (std::getline(sh, cell, ',')) ++cols;
      x.p = cols;
      first.clear();
    } else {
      x.p = static_cast<int>(first.size());
      x.values.insert(x.values.end(), first.begin(), first.end());
    }
  }
  if (x.p < 1) throw DataError("data file has no columns");
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw DataError("non-numeric cell in data row");
      x.values.push_back(v);
      ++cols;
    }
    if (cols != x.p) throw DataError("ragged data row");
  }
  x.n = static_cast<int>(x.values.size()) / x.p;
  if (x.n < 1) throw DataError("data file has no rows");
  return x;
}

inline DataMatrix read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open data file: " + path);
  return read_csv(is);
}

}  // namespace maxdist

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "maxdist/covmodel.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/extremestat.hpp"
#include "maxdist/inference.hpp"
#include "maxdist/innovations.hpp"
#include "maxdist/rng.hpp"
#include "maxdist/toeplitz.hpp"

namespace maxdist {

enum class ScaleMode { TheoreticalAp, TheoreticalBp, EstimatedAp };

inline const char* to_string(ScaleMode m) {
  switch (m) {
    case ScaleMode::TheoreticalAp:
      return "theoretical_ap";
    case ScaleMode::TheoreticalBp:
      return "theoretical_bp";
    case ScaleMode::EstimatedAp:
      return "estimated_ap";
  }
  return "?";
}

/// Replication study configuration. scale_mode defaults to theoretical_ap for
/// Gaussian innovations and theoretical_bp otherwise.
struct MCConfig {
  ToeplitzSpec model;
  InnovationSpec innovation;
  int n = 50;
  int p = 100;
  int reps = 100;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  ScaleMode scale_mode = ScaleMode::TheoreticalAp;
  std::vector<double> x_grid = {-2.0, 0.0, 2.0};
  int threads = 0;  // 0 = MAXDIST_THREADS env or hardware concurrency

  void validate() const {
    model.validate();
    innovation.validate();
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (n < 3) throw ConfigError("n must be >= 3");
    if (scale_mode == ScaleMode::EstimatedAp && n < 4)
      throw ConfigError("estimated_ap requires n >= 4");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (model.p != p) throw ConfigError("model dimension must match p");
  }
};

struct MCRecord {
  int rep = 0;
  double mn2 = 0.0;
  double standardized = 0.0;
  bool reject = false;
};

struct MCReport {
  std::vector<MCRecord> records;
  double ks_distance = 0.0;
  double rejection_rate = 0.0;
  double scale_used = 0.0;
  std::int64_t runtime_ms = 0;
};

/// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF:
/// sup over the order statistics of max(|i/N - F(x_(i))|, |(i-1)/N - F(x_(i))|).
template <class Cdf>
double ks_distance(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw EmptySampleError("ks_distance requires at least one sample");
  std::sort(samples.begin(), samples.end());
  const double nn = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs((i + 1) / nn - f));
    d = std::max(d, std::abs(static_cast<double>(i) / nn - f));
  }
  return d;
}

namespace detail {

inline constexpr std::uint64_t kPurposeRep = 0x726570ULL;  // replication draws

/// PSD validation that avoids dense eigensolves at large p: a nonnegative
/// spectral symbol certifies every finite section, AR1 with r in [0,1) is
/// always valid, and moderate p falls back to the exact eigenvalue check.
inline void validate_psd_for_simulation(const ToeplitzSpec& spec) {
  spec.validate();
  if (spec.kind == ToeplitzKind::AR1) return;
  if (min_spectral_density(spec) >= -1e-12) return;
  if (spec.p <= 1024) {
    build_model(spec);  // raises NotPSDError when genuinely indefinite
    return;
  }
  throw NotPSDError("cannot certify PSD for large-p spec with negative spectral density");
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MAXDIST_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// One replication through the Gram identity: for X = eps T the Gram matrix
/// is X X' = eps R eps', so M_n^2 and T_{2,n} never need T itself.
struct RepResult {
  double mn2 = 0.0;
  double scale = 0.0;
};

inline RepResult run_one_rep(const MCConfig& cfg, int rep, double fixed_scale) {
  const int n = cfg.n;
  const int p = cfg.p;
  RngStream rng = RngStream::substream(cfg.seed, static_cast<std::uint64_t>(rep), kPurposeRep);
  std::vector<double> eps(static_cast<std::size_t>(n) * p);
  for (double& e : eps) e = draw_innovation(cfg.innovation, rng);
  std::vector<double> w(static_cast<std::size_t>(n) * p);
  for (int i = 0; i < n; ++i)
    toeplitz_apply(cfg.model, eps.data() + static_cast<std::size_t>(i) * p,
                   w.data() + static_cast<std::size_t>(i) * p);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    const double* ei = eps.data() + static_cast<std::size_t>(i) * p;
    for (int j = i; j < n; ++j) {
      const double* wj = w.data() + static_cast<std::size_t>(j) * p;
      double s = 0.0;
      for (int k = 0; k < p; ++k) s += ei[k] * wj[k];
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  RepResult out;
  out.mn2 = max_pair_from_gram(g).dist_sq;
  out.scale = cfg.scale_mode == ScaleMode::EstimatedAp ? 8.0 / p * t2n_from_gram(g, n) : fixed_scale;
  return out;
}

}  // namespace detail

/// Runs `reps` independent replications, each on its own substream of the
/// master seed, and summarizes the standardized statistics against the limit
/// law. Records are a pure function of (config, seed): thread count and
/// scheduling never change them, and the first k records of a longer run
/// coincide with a reps=k run.
inline MCReport run_mc(const MCConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  detail::validate_psd_for_simulation(cfg.model);

  double fixed_scale = 0.0;
  if (cfg.scale_mode == ScaleMode::TheoreticalAp) {
    fixed_scale = compute_ap(cfg.model);
  } else if (cfg.scale_mode == ScaleMode::TheoreticalBp) {
    if (cfg.p > 2048)
      throw ConfigError("theoretical_bp needs a dense model; p > 2048 is not supported");
    fixed_scale = compute_bp(build_model(cfg.model), kurtosis_of(cfg.innovation));
  }

  MCReport report;
  report.records.assign(cfg.reps, MCRecord{});
  std::vector<double> scales(cfg.reps, 0.0);

  const int nworkers = std::min(detail::resolve_threads(cfg.threads), cfg.reps);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= cfg.reps) break;
        const detail::RepResult r = detail::run_one_rep(cfg, rep, fixed_scale);
        const Normalization norm = Normalization::make(cfg.n, cfg.p, r.scale);
        MCRecord rec;
        rec.rep = rep;
        rec.mn2 = r.mn2;
        rec.standardized = standardize(r.mn2, norm);
        rec.reject = r.mn2 >= test_threshold(cfg.n, cfg.p, cfg.alpha, r.scale);
        report.records[rep] = rec;
        scales[rep] = r.scale;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(cfg.reps);  // stop the other workers
    }
  };
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int wix = 0; wix < nworkers; ++wix) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> standardized(cfg.reps);
  double rejects = 0.0;
  double scale_sum = 0.0;
  for (int rix = 0; rix < cfg.reps; ++rix) {
    standardized[rix] = report.records[rix].standardized;
    rejects += report.records[rix].reject ? 1.0 : 0.0;
    scale_sum += scales[rix];
  }
  report.ks_distance = ks_distance(standardized, [](double v) { return limit_cdf(v); });
  report.rejection_rate = rejects / cfg.reps;
  report.scale_used = scale_sum / cfg.reps;
  report.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

// ---------------------------------------------------------------------------
// Report and config I/O
// ---------------------------------------------------------------------------

/// Per-replication CSV with the fixed schema `rep,mn2,standardized,reject`.
inline void write_mc_csv(const MCReport& report, std::ostream& os) {
  os << "rep,mn2,standardized,reject\n";
  char buf[96];
  for (const MCRecord& r : report.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", r.rep, r.mn2, r.standardized,
                  r.reject ? 1 : 0);
    os << buf;
  }
}

inline std::string mc_csv_string(const MCReport& report) {
  std::ostringstream ss;
  write_mc_csv(report, ss);
  return ss.str();
}

inline nlohmann::json mc_summary_json(const MCConfig& cfg, const MCReport& report) {
  nlohmann::json j;
  j["model"] = cfg.model.describe();
  j["innovation"] = cfg.innovation.describe();
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["alpha"] = cfg.alpha;
  j["scale_mode"] = to_string(cfg.scale_mode);
  j["ks_distance"] = report.ks_distance;
  j["rejection_rate"] = report.rejection_rate;
  j["scale_used"] = report.scale_used;
  j["runtime_ms"] = report.runtime_ms;
  return j;
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw ConfigError("bad numeric list entry: " + cell);
    out.push_back(v);
  }
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses the flat `key = value` config format. `#` starts a comment.
/// Recognized keys: model.kind, model.r, model.lags, n, p, reps, seed, alpha,
/// innovation, kappa4, scale_mode, x_grid, threads.
inline MCConfig parse_config(std::istream& is) {
  std::string kind = "ar1";
  double model_r = 0.0;
  std::vector<double> lags;
  std::string innovation = "gaussian";
  double kappa4 = 4.5;
  std::string scale_mode;
  MCConfig cfg;
  cfg.p = 0;

  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "model.kind") {
      kind = value;
    } else if (key == "model.r") {
      model_r = std::strtod(value.c_str(), nullptr);
    } else if (key == "model.lags") {
      lags = detail::parse_double_list(value);
    } else if (key == "n") {
      cfg.n = std::atoi(value.c_str());
    } else if (key == "p") {
      cfg.p = std::atoi(value.c_str());
    } else if (key == "reps") {
      cfg.reps = std::atoi(value.c_str());
    } else if (key == "seed") {
      cfg.seed = std::strtoull(value.c_str(), nullptr, 10);
    } else if (key == "alpha") {
      cfg.alpha = std::strtod(value.c_str(), nullptr);
    } else if (key == "innovation") {
      innovation = value;
    } else if (key == "kappa4") {
      kappa4 = std::strtod(value.c_str(), nullptr);
    } else if (key == "scale_mode") {
      scale_mode = value;
    } else if (key == "x_grid") {
      cfg.x_grid = detail::parse_double_list(value);
    } else if (key == "threads") {
      cfg.threads = std::atoi(value.c_str());
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (cfg.p < 1) throw ConfigError("config must set p");

  try {
    if (kind == "ar1") {
      cfg.model = ToeplitzSpec::ar1(model_r, cfg.p);
    } else if (kind == "mdependent") {
      cfg.model = ToeplitzSpec::m_dependent(lags, cfg.p);
    } else if (kind == "custom") {
      cfg.model = ToeplitzSpec::custom(lags, cfg.p);
    } else {
      throw ConfigError("unknown model.kind: " + kind);
    }
    if (innovation == "gaussian") {
      cfg.innovation = InnovationSpec::gaussian();
    } else if (innovation == "rademacher") {
      cfg.innovation = InnovationSpec::rademacher();
    } else if (innovation == "uniform") {
      cfg.innovation = InnovationSpec::uniform();
    } else if (innovation == "threepoint") {
      cfg.innovation = InnovationSpec::three_point(kappa4);
    } else {
      throw ConfigError("unknown innovation: " + innovation);
    }
  } catch (const BadSpecError& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  } catch (const BadKurtosisError& e) {
    throw ConfigError(std::string("invalid innovation: ") + e.what());
  }

  if (scale_mode.empty()) {
    cfg.scale_mode = cfg.innovation.kind == InnovationKind::Gaussian ? ScaleMode::TheoreticalAp
                                                                     : ScaleMode::TheoreticalBp;
  } else if (scale_mode == "theoretical_ap") {
    cfg.scale_mode = ScaleMode::TheoreticalAp;
  } else if (scale_mode == "theoretical_bp") {
    cfg.scale_mode = ScaleMode::TheoreticalBp;
  } else if (scale_mode == "estimated_ap") {
    cfg.scale_mode = ScaleMode::EstimatedAp;
  } else {
    throw ConfigError("unknown scale_mode: " + scale_mode);
  }
  cfg.validate();
  return cfg;
}

inline MCConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_config(is);
}

}  // namespace maxdist

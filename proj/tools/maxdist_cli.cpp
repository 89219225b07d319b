// Command-line front end: model constants, Monte Carlo simulation, the two
// hypothesis tests, power curves, and Poisson-approximation diagnostics.
//
// Exit codes: 0 success, 2 configuration error, 3 data error. The test
// subcommands print REJECT/ACCEPT and exit 0 either way.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxdist/maxdist.hpp"

namespace {

using namespace maxdist;

struct ModelFlags {
  std::optional<double> ar1;
  std::vector<double> mdep;
  std::vector<double> custom;
  int p = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf, bool need_p = true) {
  auto* ar1 = cmd->add_option("--ar1", mf.ar1, "AR(1) parameter r in [0,1)");
  auto* mdep = cmd->add_option("--mdep", mf.mdep, "m-dependent lags r_1..r_m")->delimiter(',');
  auto* cust =
      cmd->add_option("--custom", mf.custom, "full lag sequence r_1..r_{p-1}")->delimiter(',');
  ar1->excludes(mdep)->excludes(cust);
  mdep->excludes(cust);
  auto* p = cmd->add_option("--p", mf.p, "dimension p");
  if (need_p) p->required();
}

ToeplitzSpec spec_from_flags(const ModelFlags& mf) {
  if (!mf.mdep.empty()) return ToeplitzSpec::m_dependent(mf.mdep, mf.p);
  if (!mf.custom.empty()) return ToeplitzSpec::custom(mf.custom, mf.p);
  return ToeplitzSpec::ar1(mf.ar1.value_or(0.0), mf.p);
}

InnovationSpec innovation_from_name(const std::string& name, double kappa4) {
  if (name == "gaussian") return InnovationSpec::gaussian();
  if (name == "rademacher") return InnovationSpec::rademacher();
  if (name == "uniform") return InnovationSpec::uniform();
  if (name == "threepoint") return InnovationSpec::three_point(kappa4);
  throw ConfigError("unknown innovation: " + name);
}

int cmd_model(const ModelFlags& mf, double kappa4, int n, double gamma) {
  const ToeplitzSpec spec = spec_from_flags(mf);
  std::printf("model       : %s\n", spec.describe().c_str());
  std::printf("a_p         : %.10g\n", compute_ap(spec));
  if (spec.p <= 2048) {
    const CovModel model = build_model(spec);
    std::printf("eig_min     : %.6g\n", model.eig_min);
    std::printf("b_p(kappa4=%g) : %.10g\n", kappa4, compute_bp(model, kappa4));
    std::printf("rho_p(kappa4=%g): %.10g\n", kappa4, compute_rhop(model, kappa4));
  } else {
    std::printf("(p > 2048: b_p/rho_p need the dense root and are skipped)\n");
  }
  if (n >= 3) {
    const MixingParams mix{gamma, 2.0, 1.0};
    const double ratio = regime_ratio(n, spec.p, mix);
    std::printf("regime ratio (log n)^nu / p^(1/9) at n=%d: %.6g%s\n", n, ratio,
                ratio >= 1.0 ? "  [far from asymptotic regime]" : "");
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& csv_out,
                 const std::string& json_out, std::optional<std::uint64_t> seed_override) {
  MCConfig cfg = parse_config_file(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const MCReport report = run_mc(cfg);
  if (!csv_out.empty()) {
    std::ofstream os(csv_out);
    if (!os) throw DataError("cannot open for writing: " + csv_out);
    write_mc_csv(report, os);
  } else {
    write_mc_csv(report, std::cout);
  }
  const nlohmann::json j = mc_summary_json(cfg, report);
  if (!json_out.empty()) {
    std::ofstream os(json_out);
    if (!os) throw DataError("cannot open for writing: " + json_out);
    os << j.dump(2) << '\n';
  } else {
    std::cerr << j.dump(2) << '\n';
  }
  return 0;
}

void print_outcome(const TestOutcome& out) {
  std::printf("statistic M_n^2 : %.10g\n", out.statistic);
  std::printf("threshold       : %.10g\n", out.threshold);
  std::printf("alpha           : %g\n", out.alpha);
  std::printf("scale a_p       : %.10g\n", out.scale);
  std::printf("%s\n", out.reject ? "REJECT" : "ACCEPT");
}

int cmd_test_cov(const std::string& data_path, double alpha) {
  const DataMatrix x = read_csv_file(data_path);
  print_outcome(cov_identity_test(x, alpha));
  return 0;
}

int cmd_detect_outlier(const std::string& data_path, double alpha, std::optional<double> ap,
                       bool estimate) {
  const DataMatrix x = read_csv_file(data_path);
  TestOutcome out;
  if (estimate) {
    out = outlier_test_estimated(x, alpha);
    std::printf("estimated a_p   : %.10g\n", out.scale);
  } else {
    out = outlier_test(x, alpha, ap.value_or(8.0));
  }
  print_outcome(out);
  return 0;
}

int cmd_power(const ModelFlags& mf, int n, double alpha, const std::vector<double>& r_grid) {
  if (r_grid.empty()) {
    const PowerPoint pt = power_beta(spec_from_flags(mf), n, alpha);
    std::printf("beta = %.4f\n", pt.beta);
    return 0;
  }
  std::printf("r,a_p,beta\n");
  for (double r : r_grid) {
    const ToeplitzSpec spec = ToeplitzSpec::ar1(r, mf.p);
    const PowerPoint pt = power_beta(spec, n, alpha);
    std::printf("%g,%.10g,%.10g\n", r, compute_ap(spec), pt.beta);
  }
  return 0;
}

int cmd_diagnose(long long n, const std::vector<double>& x_grid, double rho,
                 const std::vector<long long>& n_grid, bool pair_moments, const ModelFlags& mf,
                 const std::string& innovation, double kappa4, std::size_t draws,
                 std::uint64_t seed) {
  std::printf("n,x,rho,s_n,lambda_p,lambda_limit,u1,u2_bound\n");
  for (double x : x_grid) {
    const ChenSteinReport rep = chen_stein_terms(n, x, rho);
    std::printf("%lld,%g,%g,%.10g,%.10g,%.10g,%.6g,%.6g\n", rep.n, rep.x, rep.rho, rep.s_n,
                rep.lambda_p, rep.lambda_limit, rep.u1, rep.u2_bound);
  }
  if (!n_grid.empty()) {
    std::printf("\nn,x,|lambda_p - limit|\n");
    for (double x : x_grid)
      for (const auto& [gn, gap] : lambda_limit_gap(n_grid, x))
        std::printf("%lld,%g,%.10g\n", gn, x, gap);
  }
  if (pair_moments) {
    const CovModel model = build_model(spec_from_flags(mf));
    const InnovationSpec innov = innovation_from_name(innovation, kappa4);
    std::printf("\noverlap,coord,lag,theoretical,empirical,se,draws\n");
    const int m = model.spec.p > 1 ? 1 : 0;
    const struct {
      OverlapClass oc;
      int k, m;
      const char* name;
    } cases[] = {{OverlapClass::Identical, 0, 0, "identical,same"},
                 {OverlapClass::Identical, 0, m, "identical,cross"},
                 {OverlapClass::ShareOne, 0, 0, "share_one,same"},
                 {OverlapClass::ShareOne, 0, m, "share_one,cross"}};
    for (const auto& c : cases) {
      const PairMomentReport rep = empirical_pair_cov(model, innov, c.oc, c.k, c.m, draws, seed);
      std::printf("%s,%d,%.10g,%.10g,%.3g,%zu\n", c.name, rep.lag, rep.theoretical, rep.empirical,
                  rep.se, rep.draws);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum interpoint distance: models, simulation, tests, diagnostics"};
  app.require_subcommand(1);

  auto* model_cmd = app.add_subcommand("model", "print a_p, b_p, rho_p and the regime ratio");
  ModelFlags model_mf;
  add_model_flags(model_cmd, model_mf);
  double model_kappa4 = 3.0;
  int model_n = 0;
  double model_gamma = 1.0;
  model_cmd->add_option("--kappa4", model_kappa4, "kurtosis for b_p / rho_p");
  model_cmd->add_option("--n", model_n, "sample size for the regime ratio");
  model_cmd->add_option("--gamma", model_gamma, "mixing decay exponent gamma");

  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo replication study");
  std::string sim_config, sim_csv, sim_json;
  std::optional<std::uint64_t> sim_seed;
  sim_cmd->add_option("--config", sim_config, "flat key=value config file")->required();
  sim_cmd->add_option("--out-csv", sim_csv, "per-replication CSV output path");
  sim_cmd->add_option("--out-json", sim_json, "JSON summary output path");
  sim_cmd->add_option("--seed", sim_seed, "override the config seed");

  auto* cov_cmd = app.add_subcommand("test-cov", "identity-covariance test on a data CSV");
  std::string cov_data;
  double cov_alpha = 0.05;
  cov_cmd->add_option("--data", cov_data, "CSV with header x1..xp")->required();
  cov_cmd->add_option("--alpha", cov_alpha, "significance level");

  auto* out_cmd = app.add_subcommand("detect-outlier", "global outlier test on a data CSV");
  std::string out_data;
  double out_alpha = 0.05;
  std::optional<double> out_ap;
  bool out_estimate = false;
  out_cmd->add_option("--data", out_data, "CSV with header x1..xp")->required();
  out_cmd->add_option("--alpha", out_alpha, "significance level");
  auto* ap_opt = out_cmd->add_option("--ap", out_ap, "theoretical a_p scale");
  out_cmd->add_flag("--estimate-ap", out_estimate, "plug in (8/p) T_{2,n}")->excludes(ap_opt);

  auto* pow_cmd = app.add_subcommand("power", "asymptotic power of the identity test");
  ModelFlags pow_mf;
  add_model_flags(pow_cmd, pow_mf);
  int pow_n = 50;
  double pow_alpha = 0.05;
  std::vector<double> pow_grid;
  pow_cmd->add_option("--n", pow_n, "sample size")->required();
  pow_cmd->add_option("--alpha", pow_alpha, "significance level");
  pow_cmd->add_option("--r-grid", pow_grid, "evaluate over AR(1) r values")->delimiter(',');

  auto* diag_cmd = app.add_subcommand("diagnose", "Poisson-approximation terms and pair moments");
  long long diag_n = 10000;
  std::vector<double> diag_x = {-2.0, 0.0, 2.0};
  double diag_rho = 0.25;
  std::vector<long long> diag_ngrid;
  bool diag_pairs = false;
  ModelFlags diag_mf;
  std::string diag_innov = "gaussian";
  double diag_kappa4 = 4.5;
  std::size_t diag_draws = 200000;
  std::uint64_t diag_seed = 1;
  diag_cmd->add_option("--n", diag_n, "sample size for the terms");
  diag_cmd->add_option("--x-grid", diag_x, "x values")->delimiter(',');
  diag_cmd->add_option("--rho", diag_rho, "overlap correlation in [0, 1/3]");
  diag_cmd->add_option("--n-grid", diag_ngrid, "geometric grid for the limit gaps")->delimiter(',');
  diag_cmd->add_flag("--pair-moments", diag_pairs, "Monte Carlo pair-moment reports");
  add_model_flags(diag_cmd, diag_mf, false);
  diag_cmd->add_option("--innovation", diag_innov, "gaussian|rademacher|uniform|threepoint");
  diag_cmd->add_option("--kappa4", diag_kappa4, "kurtosis for threepoint");
  diag_cmd->add_option("--draws", diag_draws, "Monte Carlo draws per pattern");
  diag_cmd->add_option("--seed", diag_seed, "Monte Carlo seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (model_cmd->parsed()) return cmd_model(model_mf, model_kappa4, model_n, model_gamma);
    if (sim_cmd->parsed()) return cmd_simulate(sim_config, sim_csv, sim_json, sim_seed);
    if (cov_cmd->parsed()) return cmd_test_cov(cov_data, cov_alpha);
    if (out_cmd->parsed()) return cmd_detect_outlier(out_data, out_alpha, out_ap, out_estimate);
    if (pow_cmd->parsed()) return cmd_power(pow_mf, pow_n, pow_alpha, pow_grid);
    if (diag_cmd->parsed()) {
      if (diag_pairs && diag_mf.p == 0) {
        std::cerr << "error: --pair-moments requires --p\n";
        return 2;
      }
      return cmd_diagnose(diag_n, diag_x, diag_rho, diag_ngrid, diag_pairs, diag_mf, diag_innov,
                          diag_kappa4, diag_draws, diag_seed);
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const TooFewRowsError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

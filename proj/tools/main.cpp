#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "osmax/comparison.hpp"
#include "osmax/config.hpp"
#include "osmax/correlation.hpp"
#include "osmax/errors.hpp"
#include "osmax/experiment.hpp"
#include "osmax/limit_law.hpp"
#include "osmax/order_stats.hpp"
#include "osmax/pickands.hpp"
#include "osmax/random.hpp"
#include "osmax/synthesis.hpp"

namespace {

constexpr int kExitValidation = 2;

struct SimulateArgs {
  std::string family = "exp_alpha";
  double alpha = 1.0;
  double r = 1.0;
  double beta = 0.5;
  double hurst = -1.0;
  double delta = 0.01;
  double horizon = 10.0;
  int n = 1;
  int m = 1;
  std::uint64_t seed = 1;
  std::string out;
};

struct EstimateArgs {
  osmax::PickandsRequest req;
  std::string kind = "continuous";
  std::string out;
};

struct LimitArgs {
  std::string theorem = "T21";
  int m = 1;
  int n = 1;
  double r = 0.0;
  double x = 0.0;
  double y = 0.0;
  int quad_order = 64;
  std::string table;
  double h_cont = 1.0;
  double h_grid = 1.0;
  std::string out;
};

struct CompareArgs {
  std::string instance;
  long long replicates = 100000;
  std::uint64_t seed = 1;
  std::string out;
};

std::ostream& open_output(const std::string& path, std::ofstream& file, bool append = false) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, append ? std::ios::app : std::ios::trunc);
  if (!file) throw osmax::ConfigError("cannot write " + path);
  return file;
}

osmax::CorrelationModel make_model(const SimulateArgs& a) {
  switch (osmax::parse_family(a.family)) {
    case osmax::CorrelationFamily::ExpAlpha: return osmax::CorrelationModel::exp_alpha(a.alpha);
    case osmax::CorrelationFamily::PolyaLog: return osmax::CorrelationModel::polya_log(a.r, a.alpha);
    case osmax::CorrelationFamily::PolyaLogInfty: return osmax::CorrelationModel::polya_log_infty(a.beta, a.alpha);
  }
  throw osmax::ConfigError("unknown family");
}

int run_simulate(const SimulateArgs& a) {
  const auto lattice = osmax::LatticeSpec::covering(a.horizon, a.delta);
  std::ofstream file;
  auto& os = open_output(a.out, file);
  if (a.hurst > 0.0) {
    osmax::write_path_csv(os, osmax::sample_fbm(a.hurst, lattice, a.seed));
    return 0;
  }
  const osmax::StationarySampler sampler(make_model(a), lattice);
  std::vector<osmax::GaussianPath> paths;
  std::vector<double> first(lattice.n_points), second(lattice.n_points);
  for (int j = 0; j < a.n; j += 2) {
    sampler.sample_pair(osmax::split_seed(a.seed, static_cast<std::uint64_t>(j / 2)), first, second);
    paths.push_back({first, lattice, a.seed});
    if (j + 1 < a.n) paths.push_back({second, lattice, a.seed});
  }
  if (a.n == 1) {
    osmax::write_path_csv(os, paths.front());
    return 0;
  }
  osmax::GaussianPath osp{osmax::order_stat_path(paths, a.m), lattice, a.seed};
  osmax::write_path_csv(os, osp);
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir, bool quiet) {
  auto config = osmax::load_experiment_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  osmax::ProgressSink progress;
  if (!quiet) progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const auto report = osmax::run_experiment(config, progress);
  osmax::write_report(report, config.output_dir);
  std::cout << std::setprecision(6);
  for (const auto& h : report.horizons)
    std::cout << "T=" << h.cdf.T << " ks_joint=" << h.cdf.ks_joint << " ks_marginal=" << h.ks_marginal << '\n';
  std::cout << "trend: " << report.verdict << " (spearman " << report.spearman_joint << ")\n";
  return osmax::report_exit_code(report);
}

int run_estimate(EstimateArgs a) {
  a.req.kind = osmax::parse_pickands_kind(a.kind);
  const auto rows = osmax::estimate_schedule(a.req);
  std::ofstream file;
  auto& os = open_output(a.out, file);
  osmax::write_estimate_header(os);
  for (const auto& e : rows) osmax::write_estimate_row(os, e);
  if (!rows.empty() && !rows.back().caveat.empty()) std::cerr << "note: " << rows.back().caveat << '\n';
  return 0;
}

int run_limit(const LimitArgs& a) {
  osmax::LimitLawSpec spec;
  spec.theorem = osmax::parse_theorem(a.theorem);
  spec.m = a.m;
  spec.n = a.n;
  spec.r_long = a.r;
  spec.quadrature_order = a.quad_order;
  if (!a.table.empty()) {
    std::ifstream in(a.table);
    if (!in) throw osmax::ConfigError("cannot open " + a.table);
    spec.joint_term = osmax::pickands_grid_joint_term(osmax::JointConstantTable::read_csv(in, a.m), a.h_cont, a.h_grid);
  }
  const double value = osmax::limit_cdf(spec, a.x, a.y);
  std::cout << std::setprecision(12) << value << '\n';
  if (!a.out.empty()) {
    const bool fresh = !std::ifstream(a.out).good();
    std::ofstream file;
    auto& os = open_output(a.out, file, true);
    if (fresh) os << "theorem,m,n,r,x,y,quad_order,value\n";
    os << std::setprecision(17) << a.theorem << ',' << a.m << ',' << a.n << ',' << a.r << ',' << a.x << ','
       << a.y << ',' << a.quad_order << ',' << value << '\n';
  }
  return 0;
}

int run_compare(const CompareArgs& a) {
  std::ifstream in(a.instance);
  if (!in) throw osmax::ConfigError("cannot open " + a.instance);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto inst = osmax::ComparisonInstance::from_json(buffer.str());
  const double bound = osmax::comparison_bound(inst);
  const auto p0 = osmax::mc_order_stat_cdf(inst.sigma0, inst.n, inst.m, inst.u, a.replicates, a.seed);
  const auto p1 = osmax::mc_order_stat_cdf(inst.sigma1, inst.n, inst.m, inst.u, a.replicates,
                                           osmax::split_seed(a.seed, 1));
  const double diff = std::abs(p0.p - p1.p);
  const double se = std::hypot(p0.se, p1.se);
  nlohmann::ordered_json j{{"bound", bound},
                           {"bound_note", "up to an absolute constant, taken as 1"},
                           {"mc_sigma0", p0.p},
                           {"mc_sigma1", p1.p},
                           {"mc_difference", diff},
                           {"mc_se", se},
                           {"replicates", a.replicates},
                           {"verdict", diff <= bound + 3.0 * se ? "dominated" : "exceeded"}};
  std::ofstream file;
  open_output(a.out, file) << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and limit laws for maxima of order statistics of Gaussian processes"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one path (or one order-statistic path) to CSV");
  simulate->add_option("--family", sim.family, "exp_alpha, polya_log or polya_log_infty");
  simulate->add_option("--alpha", sim.alpha, "Local exponent alpha in (0, 2]");
  simulate->add_option("--r", sim.r, "polya_log long-range constant");
  simulate->add_option("--beta", sim.beta, "polya_log_infty exponent in (0, 1)");
  simulate->add_option("--hurst", sim.hurst, "Simulate fractional Brownian motion with this Hurst index instead");
  simulate->add_option("--delta", sim.delta, "Lattice step");
  simulate->add_option("--horizon", sim.horizon, "Path length");
  simulate->add_option("--n", sim.n, "Number of independent copies");
  simulate->add_option("--m", sim.m, "Order statistic (1 = pointwise maximum)");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--out", sim.out, "Output CSV (default stdout)");

  std::string config_path, out_dir;
  bool quiet = false;
  auto* experiment = app.add_subcommand("experiment", "Run a convergence experiment from a config file");
  experiment->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", out_dir, "Override output directory");
  experiment->add_flag("--quiet", quiet, "No progress messages");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate-pickands", "Monte Carlo Pickands-type constants");
  estimate->add_option("--kind", est.kind, "continuous, grid or joint");
  estimate->add_option("--m", est.req.m, "Order statistic index");
  estimate->add_option("--alpha", est.req.alpha, "Index alpha in (0, 2]");
  estimate->add_option("--lambda", est.req.lambda, "Largest horizon; estimates at lambda/4, lambda/2, lambda");
  estimate->add_option("--d", est.req.d, "Grid step (grid and joint kinds)");
  estimate->add_option("--x", est.req.x, "Joint kind: continuous shift");
  estimate->add_option("--y", est.req.y, "Joint kind: grid shift");
  estimate->add_option("--step", est.req.time_step, "Lattice step; 0 selects it automatically");
  estimate->add_option("--reps", est.req.replicates, "Replicates");
  estimate->add_option("--seed", est.req.seed, "Seed");
  estimate->add_option("--out", est.out, "Output CSV (default stdout)");

  LimitArgs lim;
  auto* limit = app.add_subcommand("limit-law", "Evaluate a limiting joint distribution function");
  limit->add_option("--theorem", lim.theorem, "T21, T22, T23 or T24");
  limit->add_option("--m", lim.m, "Order statistic index");
  limit->add_option("--n", lim.n, "Number of copies");
  limit->add_option("--r", lim.r, "Long-range constant r >= 0");
  limit->add_option("--x", lim.x, "Continuous-maximum argument");
  limit->add_option("--y", lim.y, "Grid-maximum argument");
  limit->add_option("--quad-order", lim.quad_order, "Gauss-Legendre nodes per quadrature panel (>= 16)");
  limit->add_option("--hjoint-table", lim.table, "CSV z,value of H^{z,0} for T22");
  limit->add_option("--hcont", lim.h_cont, "Continuous Pickands constant (T22)");
  limit->add_option("--hgrid", lim.h_grid, "Grid Pickands constant (T22)");
  limit->add_option("--out", lim.out, "Append a CSV row to this file");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare-bound", "Normal comparison bound with a Monte Carlo check");
  compare->add_option("--instance", cmp.instance, "JSON with d, n, m, sigma0, sigma1, u")->required();
  compare->add_option("--replicates", cmp.replicates, "Monte Carlo replicates per matrix");
  compare->add_option("--seed", cmp.seed, "Seed");
  compare->add_option("--out", cmp.out, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(sim);
    if (*experiment) return run_experiment_cmd(config_path, out_dir, quiet);
    if (*estimate) return run_estimate(est);
    if (*limit) return run_limit(lim);
    if (*compare) return run_compare(cmp);
  } catch (const osmax::ValidationFailure& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kExitValidation;
  } catch (const osmax::RegimeMismatch& e) {
    std::cerr << "regime mismatch: " << e.what() << '\n';
    return kExitValidation;
  } catch (const osmax::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

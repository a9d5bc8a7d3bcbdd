// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <numbers>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "osmax/comparison.hpp"
#include "osmax/config.hpp"
#include "osmax/experiment.hpp"
#include "osmax/limit_law.hpp"
#include "osmax/orthant_measure.hpp"
#include "osmax/pickands.hpp"
#include "osmax/random.hpp"
#include "osmax/synthesis.hpp"

using namespace osmax;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  // <= 0: no runtime limit
  std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inclusion-exclusion over all nonempty subsets: the intersection of lower
// orthants is the orthant at the coordinatewise minimum.
long double brute_union(const OrthantPointSet& s) {
  const std::size_t k = s.size();
  long double acc = 0.0L;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    long double term = 1.0L;
    for (int i = 0; i < s.dim(); ++i) {
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j)
        if (mask & (1u << j)) lo = std::min(lo, s.coord(j, i));
      term *= std::exp(static_cast<long double>(lo));
    }
    acc += (std::popcount(mask) % 2 == 1) ? term : -term;
  }
  return acc;
}

Outcome orthant_exactness() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 3), count(1, 12), coarse(-8, 8);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double worst = 0.0;
  for (int inst = 0; inst < 500; ++inst) {
    OrthantPointSet s(dim(rng));
    const int k = count(rng);
    const bool ties = inst % 3 == 0;
    std::vector<double> p(static_cast<std::size_t>(s.dim()));
    for (int j = 0; j < k; ++j) {
      for (double& c : p) c = ties ? 0.25 * coarse(rng) : coord(rng);
      s.add(p);
    }
    const long double ref = brute_union(s);
    const double got = orthant_union_exp_measure(s);
    worst = std::max(worst, static_cast<double>(std::abs((got - ref) / ref)));
  }
  return {worst <= 1e-12, "500 instances, worst relative error " + fmt(worst, 3)};
}

Outcome pickands_slope(double alpha, double lambda, double step, std::size_t reps, double target) {
  PickandsRequest req;
  req.alpha = alpha;
  req.lambda = lambda;
  req.time_step = step;
  req.replicates = reps;
  req.seed = 2024;
  const double slope = estimate_schedule(req).back().slope;
  const double rel = std::abs(slope / target - 1.0);
  return {rel <= 0.10, "slope " + fmt(slope) + " vs " + fmt(target) + " (relative error " + fmt(rel, 3) +
                           "; lambda " + fmt(lambda) + ", step 1/" + fmt(1.0 / step) + ", " +
                           std::to_string(reps) + " replicates)"};
}

Outcome shift_identity() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> xy(-1.0, 1.5), shift(-1.5, 1.5);
  double worst = 0.0;
  for (int m : {1, 2}) {
    const EtaSimulator sim(m, 1.0, 2.0, 1.0 / 64.0);
    for (std::size_t rep = 0; rep < 100; ++rep) {
      const auto eta = sim.simulate(31, rep);
      const double x = xy(rng), y = xy(rng), c = shift(rng);
      const double base = joint_measure(eta, 0.5, x, y);
      const double moved = joint_measure(eta, 0.5, x + c, y + c);
      const double expect = std::exp(-m * c) * base;
      worst = std::max(worst, std::abs(moved - expect) / expect);
    }
  }
  return {worst <= 1e-9, "200 paths (m = 1, 2), worst relative error " + fmt(worst, 3)};
}

Outcome grid_monotonicity() {
  std::size_t violations = 0;
  for (int m : {1, 2}) {
    const EtaSimulator sim(m, 1.0, 4.0, 1.0 / 64.0);
    for (std::size_t rep = 0; rep < 100; ++rep) {
      const auto eta = sim.simulate(41, rep);
      const double g = grid_measure(eta, 0.5), half = grid_measure(eta, 0.25), cont = continuous_measure(eta);
      violations += !(g <= half) + !(half <= cont);
    }
  }
  return {violations == 0, "200 common-random-number paths (m = 1, 2), " + std::to_string(violations) + " violations"};
}

Outcome tail_formula() {
  const double step = 1.0 / 128.0;
  const auto lattice = LatticeSpec::make(step, 5 * 128 + 1);
  const StationarySampler sampler(CorrelationModel::exp_alpha(1.0), lattice);
  const std::size_t pairs = 100000;
  std::vector<double> a(lattice.n_points), b(lattice.n_points);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    sampler.sample_pair(split_seed(505, 0, i), a, b);
    hits += *std::max_element(a.begin(), a.end()) > 3.0;
    hits += *std::max_element(b.begin(), b.end()) > 3.0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(2 * pairs);
  const double formula = tail_probability(3.0, 5.0, 1, 1, 1.0, 1.0).value;
  const double rel = std::abs(p / formula - 1.0);
  return {rel <= 0.15, "Monte Carlo " + fmt(p) + " vs formula " + fmt(formula) + " (relative error " + fmt(rel, 3) + ")"};
}

std::string ks_list(const ExperimentReport& r, bool marginal) {
  std::string s;
  for (const auto& h : r.horizons)
    s += (s.empty() ? "" : ", ") + fmt(h.cdf.T, 5) + ": " + fmt(marginal ? h.ks_marginal : h.cdf.ks_joint, 3);
  return s;
}

Outcome weak_dependence(const fs::path& data, const fs::path& work) {
  const auto config = load_experiment_config(data / "t21_sparse.ini");
  const auto report = run_experiment(config);
  write_report(report, work / "c6");
  const double last = report.horizons.back().cdf.ks_joint;
  const bool ok = last <= 0.10 && report.spearman_joint <= -0.5;
  return {ok, "ks_joint by T {" + ks_list(report, false) + "}, Spearman " + fmt(report.spearman_joint, 3)};
}

Outcome dense_degeneracy(const fs::path& data, const fs::path& work) {
  const auto config = load_experiment_config(data / "t23_dense.ini");
  const auto report = run_experiment(config);
  write_report(report, work / "c7");
  std::vector<double> ts, excess;
  std::string list;
  std::size_t violations = 0;
  double at1000 = std::numeric_limits<double>::quiet_NaN();
  for (const auto& h : report.horizons) {
    ts.push_back(h.cdf.T);
    excess.push_back(h.dense_excess);
    violations += h.grid_violations;
    if (h.cdf.T == 1000.0) at1000 = h.dense_excess;
    list += (list.empty() ? "" : ", ") + fmt(h.cdf.T) + ": " + fmt(h.dense_excess, 3);
  }
  const double rho = spearman(ts, excess);
  const bool ok = at1000 <= 0.05 && rho <= -0.5 && violations == 0;
  return {ok, "excess fraction by T {" + list + "}, Spearman " + fmt(rho, 3) + ", grid violations " +
                  std::to_string(violations)};
}

Outcome strong_dependence(const fs::path& data, const fs::path& work) {
  const auto config = load_experiment_config(data / "t24_strong.ini");
  const auto report = run_experiment(config);
  write_report(report, work / "c8");
  const auto& last = report.horizons.back();
  const bool ok = last.cdf.T >= std::exp(9.0) - 1e-6 && last.ks_marginal <= 0.15 && report.spearman_marginal <= -0.5;
  return {ok, "KS vs normal by T {" + ks_list(report, true) + "}, Spearman " + fmt(report.spearman_marginal, 3)};
}

Outcome limit_evaluator() {
  const std::vector<std::pair<double, double>> probes{{0.0, 0.0}, {-1.0, 1.0}, {2.0, 0.5}, {-0.5, -0.5}};
  double worst = 0.0;
  for (double r : {0.5, 2.0}) {
    for (int m : {1, 3}) {
      LimitLawSpec spec;
      spec.theorem = Theorem::T21;
      spec.r_long = r;
      spec.m = spec.n = m;
      std::vector<double> acc(probes.size(), 0.0);
      NormalStream z(split_seed(909, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r * 10)));
      const double c = std::sqrt(2.0 * r * m);
      const std::size_t draws = 10'000'000;
      for (std::size_t i = 0; i < draws; ++i) {
        const double w = std::exp(-r + c * z());
        for (std::size_t k = 0; k < probes.size(); ++k)
          acc[k] += std::exp(-w * (std::exp(-probes[k].first) + std::exp(-probes[k].second)));
      }
      for (std::size_t k = 0; k < probes.size(); ++k) {
        const double mc = acc[k] / static_cast<double>(draws);
        worst = std::max(worst, std::abs(mc - limit_cdf(spec, probes[k].first, probes[k].second)));
      }
    }
  }
  double factor = 0.0;
  for (int m : {1, 3}) {
    LimitLawSpec spec;
    spec.theorem = Theorem::T21;
    spec.m = spec.n = m;
    for (double x = -2.0; x <= 3.0; x += 0.5)
      for (double y = -2.0; y <= 3.0; y += 0.5)
        factor = std::max(factor, std::abs(limit_cdf(spec, x, y) - marginal_cdf(0.0, m, x) * marginal_cdf(0.0, m, y)));
  }
  return {worst <= 1e-3 && factor <= 1e-12,
          "worst |quadrature - Monte Carlo| " + fmt(worst, 3) + ", factorization error at r = 0 " + fmt(factor, 3)};
}

Eigen::MatrixXd random_correlation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(d, d + 2);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
  Eigen::MatrixXd s = a * a.transpose();
  const Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
  s = inv.asDiagonal() * s * inv.asDiagonal();
  s.diagonal().setOnes();
  return s;
}

Outcome comparison_domination() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> dim(2, 4), copies(1, 3);
  std::uniform_real_distribution<double> level(1.5, 3.5), mix(0.0, 1.0);
  int dominated = 0, total = 0;
  for (int inst = 0; inst < 200; ++inst) {
    ComparisonInstance c;
    c.d = dim(rng);
    c.n = copies(rng);
    c.m = std::uniform_int_distribution<int>(1, c.n)(rng);
    c.sigma0 = random_correlation(c.d, rng);
    // Half of the instances compare nearby matrices, where the bound is tight.
    const double w = inst % 2 ? 1.0 : 0.2 * mix(rng);
    c.sigma1 = (1.0 - w) * c.sigma0 + w * random_correlation(c.d, rng);
    c.u.resize(c.d);
    for (int i = 0; i < c.d; ++i) c.u(i) = level(rng);
    const double bound = comparison_bound(c);
    const auto p0 = mc_order_stat_cdf(c.sigma0, c.n, c.m, c.u, 100000, split_seed(1010, 0, inst));
    const auto p1 = mc_order_stat_cdf(c.sigma1, c.n, c.m, c.u, 100000, split_seed(1010, 1, inst));
    const double se = std::hypot(p0.se, p1.se);
    dominated += std::abs(p1.p - p0.p) <= bound + 3.0 * se;
    ++total;
  }
  const double rate = static_cast<double>(dominated) / total;
  return {rate >= 0.95, std::to_string(dominated) + " of " + std::to_string(total) + " instances dominated"};
}

Outcome determinism(const fs::path& data, const fs::path& work) {
  if (!fs::exists(work / "c6" / "cdf.csv")) {
    const auto config = load_experiment_config(data / "t21_sparse.ini");
    write_report(run_experiment(config), work / "c6");
  }
  const auto config = load_experiment_config(data / "t21_sparse.ini");
  write_report(run_experiment(config), work / "c11");
  std::vector<std::string> differing;
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(work / "c6")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    if (slurp(entry.path()) != slurp(work / "c11" / entry.path().filename()))
      differing.push_back(entry.path().filename().string());
  }
  std::string detail = std::to_string(compared) + " CSV files compared";
  for (const auto& f : differing) detail += ", differs: " + f;
  return {compared > 0 && differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osmax acceptance suite"};
  std::string data = "tests/data", work = "acceptance-out";
  std::vector<int> only;
  app.add_option("--data", data, "directory with the experiment configurations")->check(CLI::ExistingDirectory);
  app.add_option("--work", work, "scratch directory for experiment outputs");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path data_dir(data), work_dir(work);
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  const std::vector<Criterion> criteria{
      {1, "orthant-union measure matches inclusion-exclusion", 10, orthant_exactness},
      {2, "Pickands slope, alpha = 1", 300, [] { return pickands_slope(1.0, 4.0, 1.0 / 256.0, 2'000'000, 1.0); }},
      {2, "Pickands slope, alpha = 2", 300,
       [] { return pickands_slope(2.0, 1.0, 1.0 / 64.0, 1'000'000, 1.0 / std::sqrt(std::numbers::pi)); }},
      {3, "shift identity of the joint measure", 30, shift_identity},
      {4, "grid monotonicity", 30, grid_monotonicity},
      {5, "tail formula", 180, tail_formula},
      {6, "weak dependence, sparse grid", 600, [&] { return weak_dependence(data_dir, work_dir); }},
      {7, "dense-grid degeneracy", 300, [&] { return dense_degeneracy(data_dir, work_dir); }},
      {8, "strong dependence, normal limit", 600, [&] { return strong_dependence(data_dir, work_dir); }},
      {9, "limit-law evaluator", 60, limit_evaluator},
      {10, "comparison bound domination", 600, comparison_domination},
      {11, "determinism of experiment outputs", 0, [&] { return determinism(data_dir, work_dir); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::string timing = fmt(secs, 3) + " s";
    if (c.limit_seconds > 0) timing += (in_time ? " < " : " >= ") + fmt(c.limit_seconds) + " s";
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title << " -- " << out.detail
              << " [" << timing << "]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}

#include "osmax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "osmax/errors.hpp"
#include "osmax/limit_law.hpp"
#include "osmax/parallel.hpp"
#include "osmax/pickands.hpp"
#include "osmax/random.hpp"
#include "osmax/synthesis.hpp"

namespace osmax {

namespace {

constexpr double kExcessThreshold = 0.25;
constexpr std::uint64_t kPathStream = 0x7061746873ULL;

struct Constants {
  double H_cont = 0.0;
  std::optional<double> H_grid;
  std::optional<JointConstantTable> joint;
  std::string provenance;
};

std::optional<double> classical_constant(int m, double alpha) {
  if (m != 1) return std::nullopt;
  if (alpha == 1.0) return 1.0;
  if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  return std::nullopt;
}

Constants resolve_constants(const ExperimentConfig& c, const ProgressSink& progress) {
  Constants out;
  const auto& cc = c.constants;
  const double alpha = c.model.alpha();
  const bool estimate = cc.source == ConstantsSource::Estimated;
  std::vector<std::string> notes;

  auto run_estimate = [&](PickandsKind kind) {
    PickandsRequest req;
    req.kind = kind;
    req.m = c.m;
    req.alpha = alpha;
    req.lambda = cc.estimate_lambda;
    req.d = c.grid_param;
    req.replicates = cc.estimate_replicates;
    req.seed = split_seed(c.master_seed, 0x636f6e7374ULL, static_cast<std::uint64_t>(kind));
    if (progress) progress("estimating " + std::string(to_string(kind)) + " Pickands constant");
    return estimate_schedule(req).back().slope;
  };

  if (cc.H_cont) {
    out.H_cont = *cc.H_cont;
    notes.emplace_back("H_cont from config");
  } else if (auto classical = classical_constant(c.m, alpha)) {
    out.H_cont = *classical;
    notes.emplace_back("H_cont classical value");
  } else if (estimate) {
    out.H_cont = run_estimate(PickandsKind::Continuous);
    notes.emplace_back("H_cont estimated");
  } else {
    throw ConfigError("no value for H_cont: set constants.H_cont or constants.source = estimated");
  }

  if (c.regime == GridRegime::Pickands) {
    if (cc.H_grid) {
      out.H_grid = *cc.H_grid;
      notes.emplace_back("H_grid from config");
    } else if (estimate) {
      out.H_grid = run_estimate(PickandsKind::Grid);
      notes.emplace_back("H_grid estimated");
    } else {
      throw ConfigError("Pickands grid needs constants.H_grid or constants.source = estimated");
    }
  }

  if (c.theorem == Theorem::T22) {
    if (cc.joint_table) {
      std::ifstream in(*cc.joint_table);
      if (!in) throw ConfigError("cannot open joint table " + cc.joint_table->string());
      out.joint = JointConstantTable::read_csv(in, c.m);
      notes.emplace_back("joint table from " + cc.joint_table->filename().string());
    } else if (estimate) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& [x, y] : c.probes) {
        lo = std::min(lo, x - y);
        hi = std::max(hi, x - y);
      }
      const double shift = std::log(out.H_cont) - std::log(*out.H_grid);
      std::vector<double> zs;
      for (double z = lo + shift - 0.5; z <= hi + shift + 0.5 + 1e-9; z += 0.125) zs.push_back(z);
      if (progress) progress("estimating joint constant table");
      const auto rows = estimate_joint_table(c.m, alpha, c.grid_param, zs, cc.estimate_lambda, 0.0,
                                             cc.estimate_replicates,
                                             split_seed(c.master_seed, 0x6a6f696e74ULL));
      std::vector<double> z, v;
      for (const auto& row : rows) {
        z.push_back(row.z);
        v.push_back(row.value);
      }
      out.joint.emplace(c.m, std::move(z), std::move(v));
      notes.emplace_back("joint table estimated");
    } else {
      throw ConfigError("Pickands-grid law needs constants.joint_table or constants.source = estimated");
    }
  }

  for (std::size_t i = 0; i < notes.size(); ++i) out.provenance += (i ? "; " : "") + notes[i];
  return out;
}

void check_regime(Theorem theorem, GridRegime regime) {
  const auto want = [&]() -> std::optional<GridRegime> {
    switch (theorem) {
      case Theorem::T21: return GridRegime::Sparse;
      case Theorem::T22: return GridRegime::Pickands;
      case Theorem::T23: return GridRegime::Dense;
      case Theorem::T24: return std::nullopt;
    }
    return std::nullopt;
  }();
  if (want && *want != regime)
    throw RegimeMismatch(std::string(to_string(theorem)) + " needs a " + std::string(to_string(*want)) +
                         " grid, got " + std::string(to_string(regime)));
}

/// Raw maxima of one replicate: continuous proxy on the simulated lattice, on
/// the coarse lattice (every other point when the bias probe is on), and the grid.
struct RawMaxima {
  double fine = 0.0;
  double coarse = 0.0;
  double grid = 0.0;
};

/// Supplies path number g = replicate * n + j; paths 2q and 2q + 1 are the two
/// halves of one complex circulant draw seeded by q.
class PathStream {
 public:
  PathStream(const StationarySampler& sampler, std::uint64_t seed)
      : sampler_(sampler), seed_(seed), a_(sampler.lattice().n_points), b_(sampler.lattice().n_points) {}

  std::span<const double> path(std::uint64_t g) {
    const std::uint64_t q = g / 2;
    if (q != cached_) {
      sampler_.sample_pair(split_seed(seed_, kPathStream, q), a_, b_);
      cached_ = q;
    }
    return g % 2 == 0 ? std::span<const double>(a_) : std::span<const double>(b_);
  }

 private:
  const StationarySampler& sampler_;
  std::uint64_t seed_;
  std::vector<double> a_, b_;
  std::uint64_t cached_ = std::numeric_limits<std::uint64_t>::max();
};

double normalize(double M, double b, double a, Theorem theorem, double r_T) {
  if (theorem == Theorem::T24) return (M - std::sqrt(1.0 - r_T) * b) / std::sqrt(r_T);
  return a * (M - b);
}

double independence_statistic(std::span<const std::pair<double, double>> samples,
                              std::span<const std::pair<double, double>> probes) {
  const double count = static_cast<double>(samples.size());
  double worst = 0.0;
  for (const auto& [x, y] : probes) {
    std::size_t both = 0, fx = 0, fy = 0;
    for (const auto& [sx, sy] : samples) {
      const bool bx = sx <= x, by = sy <= y;
      fx += bx;
      fy += by;
      both += bx && by;
    }
    const double joint = static_cast<double>(both) / count;
    const double product = static_cast<double>(fx) / count * (static_cast<double>(fy) / count);
    worst = std::max(worst, std::abs(joint - product));
  }
  return worst;
}

double marginal_ks(std::span<const double> values, std::span<const std::pair<double, double>> probes,
                   const std::function<double(double)>& theory) {
  std::vector<double> xs;
  for (const auto& pr : probes)
    if (std::find(xs.begin(), xs.end(), pr.first) == xs.end()) xs.push_back(pr.first);
  double worst = 0.0;
  for (double x : xs) {
    const auto below = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
    worst = std::max(worst, std::abs(static_cast<double>(below) / static_cast<double>(values.size()) - theory(x)));
  }
  return worst;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

EmpiricalJointCDF empirical_joint_cdf(std::span<const std::pair<double, double>> samples,
                                      std::span<const std::pair<double, double>> probes,
                                      const std::function<double(double, double)>& theory) {
  if (samples.empty()) throw EmptySamples("empirical CDF of an empty sample");
  EmpiricalJointCDF out;
  out.replicates = samples.size();
  out.ks_joint = theory ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  for (const auto& [x, y] : probes) {
    const auto hits = std::count_if(samples.begin(), samples.end(),
                                    [x, y](const auto& s) { return s.first <= x && s.second <= y; });
    ProbeResult r;
    r.x = x;
    r.y = y;
    r.empirical = static_cast<double>(hits) / static_cast<double>(samples.size());
    if (theory) {
      r.theoretical = theory(x, y);
      r.abs_err = std::abs(r.empirical - r.theoretical);
      out.ks_joint = std::max(out.ks_joint, r.abs_err);
    } else {
      r.theoretical = r.abs_err = std::numeric_limits<double>::quiet_NaN();
    }
    out.probes.push_back(r);
  }
  return out;
}

double ks_statistic(std::span<const double> empirical, std::span<const double> theoretical) {
  if (empirical.size() != theoretical.size()) throw LengthMismatch("KS statistic: lengths differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) worst = std::max(worst, std::abs(empirical[i] - theoretical[i]));
  return worst;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LengthMismatch("Spearman: lengths differ");
  const std::size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [n](std::span<const double> v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressSink& progress) {
  config.validate();
  validate_for_theorem(config.model, config.theorem).require();
  check_regime(config.theorem, config.regime);

  const Constants constants = resolve_constants(config, progress);
  const int m = config.m, n = config.n;
  const double alpha = config.model.alpha();
  const double r_long = config.theorem == Theorem::T24 ? 0.0 : long_range_limit(config.model);

  LimitLawSpec law;
  law.theorem = config.theorem;
  law.m = m;
  law.n = n;
  law.r_long = r_long;
  law.quadrature_order = config.quadrature_order;
  if (constants.joint) law.joint_term = pickands_grid_joint_term(*constants.joint, constants.H_cont, *constants.H_grid);
  const auto joint_theory = [&](double x, double y) { return limit_cdf(law, x, y); };
  const std::function<double(double)> marginal_theory = [&](double x) {
    return config.theorem == Theorem::T24 ? normal_cdf(x) : marginal_cdf(r_long, m, x, config.quadrature_order);
  };

  ExperimentReport report;
  report.config = config;
  report.H_cont = constants.H_cont;
  report.H_grid = constants.H_grid;
  report.constants_provenance = constants.provenance;

  for (std::size_t ti = 0; ti < config.T_schedule.size(); ++ti) {
    const double T = config.T_schedule[ti];
    const double scale = regime_scale(T, m, alpha);
    const double delta = config.epsilon_cont / scale;
    const LatticeSpec coarse = LatticeSpec::covering(T, delta);
    const GridSpec grid = make_aligned_grid(config.regime, config.grid_param, T, m, alpha, coarse);
    const std::size_t stride = grid_stride(grid, coarse);
    if (stride == 0) throw StepMismatch("grid is not aligned with the continuous-approximation lattice");

    const std::size_t factor = config.bias_probe ? 2 : 1;
    const LatticeSpec sim = config.bias_probe ? LatticeSpec::make(0.5 * delta, 2 * (coarse.n_points - 1) + 1) : coarse;
    const std::size_t last = std::min(sim.n_points - 1,
                                      static_cast<std::size_t>(std::floor(T / sim.delta * (1.0 + 1e-12))));
    if (progress)
      progress("T = " + fmt(T) + ": " + std::to_string(sim.n_points) + " lattice points, grid stride " +
               std::to_string(stride) + ", " + std::to_string(config.replicates) + " replicates");

    const StationarySampler sampler(config.model, sim);
    const std::uint64_t horizon_seed = split_seed(config.master_seed, ti);
    std::vector<RawMaxima> raw(config.replicates);
    parallel_chunks(config.replicates, [&](std::size_t begin, std::size_t end) {
      PathStream stream(sampler, horizon_seed);
      std::vector<std::vector<double>> paths(static_cast<std::size_t>(n));
      std::vector<std::span<const double>> views(static_cast<std::size_t>(n));
      for (std::size_t r = begin; r < end; ++r) {
        for (int j = 0; j < n; ++j) {
          const auto src = stream.path(static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n) +
                                       static_cast<std::uint64_t>(j));
          auto& dst = paths[static_cast<std::size_t>(j)];
          dst.assign(src.begin(), src.end());
          views[static_cast<std::size_t>(j)] = dst;
        }
        const auto osp = n == 1 ? paths[0] : order_stat_path(views, m);
        RawMaxima mx{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
        for (std::size_t k = 0; k <= last; ++k) mx.fine = std::max(mx.fine, osp[k]);
        for (std::size_t k = 0; k <= last; k += factor) mx.coarse = std::max(mx.coarse, osp[k]);
        for (std::size_t k = 0; k <= last; k += stride * factor) mx.grid = std::max(mx.grid, osp[k]);
        raw[r] = mx;
      }
    });

    HorizonResult h;
    h.delta = delta;
    h.lattice_points = coarse.n_points;
    h.p = grid.p;
    h.grid_stride = stride;
    h.scaled_step = grid.scaled_step();
    h.embedding_clipped = sampler.uses_circulant() && sampler.spectrum().clipped;

    const auto nc = norming_constants(m, n, alpha, T, grid.p, constants.H_cont, constants.H_grid);
    h.a = nc.a;
    h.b_cont = nc.b_cont;
    h.b_grid = config.theorem == Theorem::T23 ? nc.b_cont : nc.b_star(config.regime);
    h.r_T = config.model(T);
    if (config.theorem == Theorem::T24 && !(h.r_T > 0.0 && h.r_T < 1.0))
      throw DomainError("strong-dependence normalization needs 0 < r(T) < 1");

    std::vector<std::pair<double, double>> samples(raw.size()), samples_fine;
    std::vector<double> cont(raw.size()), cont_fine;
    double shift = 0.0;
    for (std::size_t r = 0; r < raw.size(); ++r) {
      const auto& mx = raw[r];
      samples[r] = {normalize(mx.coarse, h.b_cont, h.a, config.theorem, h.r_T),
                    normalize(mx.grid, h.b_grid, h.a, config.theorem, h.r_T)};
      cont[r] = samples[r].first;
      if (mx.grid > mx.coarse) ++h.grid_violations;
      if (h.a * (mx.coarse - mx.grid) > kExcessThreshold) h.dense_excess += 1.0;
      shift += h.a * (mx.fine - mx.coarse);
      if (config.write_maxima) {
        MaximaSample s;
        s.m_cont = mx.coarse;
        s.m_grid = mx.grid;
        s.T = T;
        s.m = m;
        s.n = n;
        s.regime = config.regime;
        s.seed = horizon_seed;
        h.maxima.push_back(s);
      }
    }
    h.dense_excess /= static_cast<double>(raw.size());
    h.cdf = empirical_joint_cdf(samples, config.probes, joint_theory);
    h.cdf.T = T;
    h.ks_marginal = marginal_ks(cont, config.probes, marginal_theory);
    h.independence = independence_statistic(samples, config.probes);

    if (config.bias_probe) {
      samples_fine.resize(raw.size());
      cont_fine.resize(raw.size());
      for (std::size_t r = 0; r < raw.size(); ++r) {
        samples_fine[r] = {normalize(raw[r].fine, h.b_cont, h.a, config.theorem, h.r_T), samples[r].second};
        cont_fine[r] = samples_fine[r].first;
      }
      BiasProbe b;
      b.epsilon = 0.5 * config.epsilon_cont;
      b.ks_joint = empirical_joint_cdf(samples_fine, config.probes, joint_theory).ks_joint;
      b.ks_marginal = marginal_ks(cont_fine, config.probes, marginal_theory);
      b.mean_shift = shift / static_cast<double>(raw.size());
      h.bias = b;
    }
    if (progress)
      progress("T = " + fmt(T) + ": ks_joint = " + fmt(h.cdf.ks_joint) + ", ks_marginal = " + fmt(h.ks_marginal));
    report.horizons.push_back(std::move(h));
  }

  std::vector<double> Ts, ksj, ksm;
  for (const auto& h : report.horizons) {
    Ts.push_back(h.cdf.T);
    ksj.push_back(h.cdf.ks_joint);
    ksm.push_back(h.ks_marginal);
  }
  report.spearman_joint = spearman(Ts, ksj);
  report.spearman_marginal = spearman(Ts, ksm);
  if (Ts.size() < 2) report.verdict = "single horizon";
  else report.verdict = report.spearman_joint <= -0.5 ? "converging" : "not converging";
  return report;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& c = report.config;

  auto open = [&](const char* name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    os << std::setprecision(17);
    return os;
  };

  {
    auto os = open("cdf.csv");
    os << "T,probe_x,probe_y,empirical,theoretical,abs_err\n";
    for (const auto& h : report.horizons)
      for (const auto& p : h.cdf.probes)
        os << h.cdf.T << ',' << p.x << ',' << p.y << ',' << p.empirical << ',' << p.theoretical << ','
           << p.abs_err << '\n';
  }
  if (c.write_maxima) {
    auto os = open("maxima.csv");
    write_maxima_header(os);
    for (const auto& h : report.horizons)
      for (const auto& s : h.maxima) write_maxima_row(os, s);
  }

  nlohmann::ordered_json j;
  j["theorem"] = std::string(to_string(c.theorem));
  j["model"] = c.model.to_key_values();
  j["m"] = c.m;
  j["n"] = c.n;
  j["regime"] = std::string(to_string(c.regime));
  j["grid_param"] = c.grid_param;
  j["epsilon_cont"] = c.epsilon_cont;
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["constants"] = {{"H_cont", report.H_cont}, {"provenance", report.constants_provenance}};
  if (report.H_grid) j["constants"]["H_grid"] = *report.H_grid;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.horizons.size(); ++i) {
    const auto& h = report.horizons[i];
    nlohmann::ordered_json row;
    row["T"] = h.cdf.T;
    row["seed"] = split_seed(c.master_seed, i);
    row["ks_joint"] = h.cdf.ks_joint;
    row["ks_marginal"] = h.ks_marginal;
    row["independence"] = h.independence;
    row["dense_excess"] = h.dense_excess;
    row["grid_violations"] = h.grid_violations;
    row["delta"] = h.delta;
    row["lattice_points"] = h.lattice_points;
    row["p"] = h.p;
    row["grid_stride"] = h.grid_stride;
    row["scaled_step"] = h.scaled_step;
    row["a"] = h.a;
    row["b_cont"] = h.b_cont;
    row["b_grid"] = h.b_grid;
    if (c.theorem == Theorem::T24) row["r_T"] = h.r_T;
    row["embedding_clipped"] = h.embedding_clipped;
    if (h.bias)
      row["bias_probe"] = {{"epsilon", h.bias->epsilon},
                           {"ks_joint", h.bias->ks_joint},
                           {"ks_marginal", h.bias->ks_marginal},
                           {"mean_shift", h.bias->mean_shift}};
    rows.push_back(row);
  }
  j["horizons"] = rows;
  j["trend"] = {{"spearman_joint", report.spearman_joint},
                {"spearman_marginal", report.spearman_marginal},
                {"verdict", report.verdict}};
  {
    auto os = open("summary.json");
    os << j.dump(2) << '\n';
  }

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  auto os = open("run_info.json");
  os << nlohmann::ordered_json{{"finished_at", stamp.str()}}.dump(2) << '\n';
}

int report_exit_code(const ExperimentReport& report) noexcept { return report.converging() ? 0 : 3; }

}  // namespace osmax

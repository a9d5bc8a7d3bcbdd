#include "osmax/pickands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

#include "osmax/errors.hpp"
#include "osmax/parallel.hpp"
#include "osmax/random.hpp"

namespace osmax {

namespace {

constexpr int kMaxHalvings = 4;
constexpr double kStepTolerance = 0.01;
constexpr std::size_t kBlock = 1024;

/// Index stride s with s * step == length, or throws StepMismatch.
std::size_t exact_stride(double length, double step, const char* what) {
  const double k = std::round(length / step);
  if (k < 1.0 || std::abs(k * step - length) > 1e-12 * std::max(1.0, length) + 1e-15)
    throw StepMismatch(std::string("time step does not divide ") + what);
  return static_cast<std::size_t>(k);
}

std::size_t last_index(const EtaPaths& eta, double horizon) {
  if (horizon < 0.0) return eta.count - 1;
  const auto k = static_cast<std::size_t>(std::floor(horizon / eta.step * (1.0 + 1e-12) + 1e-12));
  return std::min(k, eta.count - 1);
}

OrthantPointSet collect(const EtaPaths& eta, std::size_t last, std::size_t stride, double shift) {
  OrthantPointSet pts(eta.m);
  pts.reserve(last / stride + 1);
  std::vector<double> p(static_cast<std::size_t>(eta.m));
  for (std::size_t k = 0; k <= last; k += stride) {
    for (int i = 0; i < eta.m; ++i) p[static_cast<std::size_t>(i)] = eta.at(i, k) - shift;
    pts.add(p);
  }
  return pts;
}

double max_min_1d(const EtaPaths& eta, std::size_t last, std::size_t stride) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= last; k += stride) best = std::max(best, eta.values[k]);
  return best;
}

/// Caches the most recent pair draw so consecutive paths sharing a pair are
/// simulated once.
class EtaStream {
 public:
  EtaStream(int m, double alpha, double step, std::size_t count, const FbmGenerator* fbm,
            std::uint64_t seed)
      : m_(m), alpha_(alpha), step_(step), count_(count), fbm_(fbm), seed_(seed),
        first_(count), second_(count), drift_(count) {
    for (std::size_t k = 0; k < count; ++k)
      drift_[k] = std::pow(static_cast<double>(k) * step, alpha);
    current_.m = m;
    current_.step = step;
    current_.count = count;
    current_.values.resize(static_cast<std::size_t>(m) * count);
  }

  const EtaPaths& get(std::size_t replicate) {
    for (int i = 0; i < m_; ++i) {
      const std::size_t g = replicate * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i);
      draw(g / 2);
      const auto& b = (g % 2 == 0) ? first_ : second_;
      double* out = current_.values.data() + static_cast<std::size_t>(i) * count_;
      for (std::size_t k = 0; k < count_; ++k) out[k] = std::sqrt(2.0) * b[k] - drift_[k];
    }
    return current_;
  }

 private:
  void draw(std::size_t pair) {
    if (pair == cached_pair_) return;
    cached_pair_ = pair;
    const std::uint64_t s = split_seed(seed_, pair);
    if (fbm_) {
      fbm_->sample_pair_into(s, first_, second_);
      return;
    }
    // alpha = 2: B(t) = t Z
    NormalStream normal(s);
    const double za = normal(), zb = normal();
    for (std::size_t k = 0; k < count_; ++k) {
      const double t = static_cast<double>(k) * step_;
      first_[k] = za * t;
      second_[k] = zb * t;
    }
  }

  int m_;
  double alpha_;
  double step_;
  std::size_t count_;
  const FbmGenerator* fbm_;
  std::uint64_t seed_;
  std::size_t cached_pair_ = std::numeric_limits<std::size_t>::max();
  std::vector<double> first_, second_, drift_;
  EtaPaths current_;
};

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// Per-replicate measures for every (horizon, level) cell, reduced in fixed
/// blocks so the result does not depend on the number of threads.
/// Level l uses stride 2^(levels - 1 - l) on the finest lattice.
std::vector<Moments> accumulate(const PickandsRequest& req, double finest_step,
                                std::span<const double> horizons, int levels,
                                const std::vector<double>& shifts_x = {}) {
  const double lambda = *std::max_element(horizons.begin(), horizons.end());
  const std::size_t count = exact_stride(lambda, finest_step, "lambda") + 1;
  const std::size_t cells = horizons.size() * static_cast<std::size_t>(levels) *
                            std::max<std::size_t>(1, shifts_x.size());
  const std::size_t blocks = (req.replicates + kBlock - 1) / kBlock;
  std::vector<Moments> partial(blocks * cells);

  if (req.kind != PickandsKind::Continuous) exact_stride(req.d, finest_step, "d");

  parallel_chunks(blocks, [&](std::size_t b0, std::size_t b1) {
    const FbmGenerator* fbm = nullptr;
    std::optional<FbmGenerator> local;
    if (req.alpha < 2.0) {
      local.emplace(req.alpha / 2.0, LatticeSpec::make(finest_step, count));
      fbm = &*local;
    }
    EtaStream stream(req.m, req.alpha, finest_step, count, fbm, req.seed);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t r_end = std::min(req.replicates, (b + 1) * kBlock);
      Moments* out = partial.data() + b * cells;
      for (std::size_t r = b * kBlock; r < r_end; ++r) {
        const EtaPaths& eta = stream.get(r);
        std::size_t cell = 0;
        for (double h : horizons) {
          for (int l = 0; l < levels; ++l) {
            const std::size_t stride = std::size_t{1} << (levels - 1 - l);
            auto record = [&](double v) {
              out[cell].sum += v;
              out[cell].sum_sq += v * v;
              ++cell;
            };
            switch (req.kind) {
              case PickandsKind::Continuous: record(continuous_measure(eta, h, stride)); break;
              case PickandsKind::Grid: record(grid_measure(eta, req.d, h)); break;
              case PickandsKind::Joint:
                if (shifts_x.empty()) {
                  record(joint_measure(eta, req.d, req.x, req.y, h, stride));
                } else {
                  for (double z : shifts_x) record(joint_measure(eta, req.d, z, 0.0, h, stride));
                }
                break;
            }
          }
        }
      }
    }
  });

  std::vector<Moments> total(cells);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t c = 0; c < cells; ++c) {
      total[c].sum += partial[b * cells + c].sum;
      total[c].sum_sq += partial[b * cells + c].sum_sq;
    }
  return total;
}

void validate(const PickandsRequest& req) {
  if (req.m < 1) throw DomainError("Pickands: m must be >= 1");
  if (!(req.alpha > 0.0 && req.alpha <= 2.0)) throw DomainError("Pickands: alpha must lie in (0, 2]");
  if (!(req.lambda > 0.0)) throw DomainError("Pickands: lambda must be positive");
  if (req.replicates < 2) throw DomainError("Pickands: need at least two replicates");
  if (req.kind != PickandsKind::Continuous && !(req.d > 0.0))
    throw DomainError("Pickands: grid constants need d > 0");
}

std::string caveat_for(PickandsKind kind, bool converged) {
  std::string c = kind == PickandsKind::Grid
                      ? "exact on grid points; Monte Carlo error only"
                      : "lattice-restricted supremum underestimates the continuous-time constant";
  if (!converged) c += "; step control did not reach 1% agreement";
  return c;
}

PickandsEstimate make_estimate(const PickandsRequest& req, double lambda, double step,
                               const Moments& mo) {
  const double n = static_cast<double>(req.replicates);
  const double mean = mo.sum / n;
  const double var = std::max(0.0, (mo.sum_sq - n * mean * mean) / (n - 1.0));
  PickandsEstimate e;
  e.kind = req.kind;
  e.m = req.m;
  e.alpha = req.alpha;
  e.lambda = lambda;
  e.d = req.d;
  e.x = req.x;
  e.y = req.y;
  e.value_of_lambda = mean;
  e.slope = mean / lambda;
  e.ci_halfwidth = 1.96 * std::sqrt(var / n);
  e.replicates = req.replicates;
  e.time_step = step;
  return e;
}

/// Finest step and level count for a request; auto mode starts at min(d, lambda)/64.
std::pair<double, int> step_plan(const PickandsRequest& req) {
  if (req.time_step > 0.0) return {req.time_step, 1};
  double base = req.lambda;
  if (req.kind != PickandsKind::Continuous) base = std::min(base, req.d);
  return {base / 64.0 / static_cast<double>(1 << kMaxHalvings), kMaxHalvings + 1};
}

}  // namespace

std::string_view to_string(PickandsKind kind) {
  switch (kind) {
    case PickandsKind::Continuous: return "continuous";
    case PickandsKind::Grid: return "grid";
    case PickandsKind::Joint: return "joint";
  }
  return "unknown";
}

PickandsKind parse_pickands_kind(std::string_view name) {
  if (name == "continuous") return PickandsKind::Continuous;
  if (name == "grid") return PickandsKind::Grid;
  if (name == "joint") return PickandsKind::Joint;
  throw ConfigError("unknown Pickands kind '" + std::string(name) + "'");
}

EtaPaths EtaPaths::origin(int m) {
  EtaPaths e;
  e.m = m;
  e.step = 1.0;
  e.count = 1;
  e.values.assign(static_cast<std::size_t>(m), 0.0);
  return e;
}

EtaSimulator::EtaSimulator(int m, double alpha, double lambda, double step)
    : m_(m), alpha_(alpha), step_(step) {
  if (m < 1) throw DomainError("eta: m must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("eta: alpha must lie in (0, 2]");
  count_ = exact_stride(lambda, step, "lambda") + 1;
  if (alpha < 2.0) fbm_.emplace(alpha / 2.0, LatticeSpec::make(step, count_));
}

EtaPaths EtaSimulator::simulate(std::uint64_t seed, std::size_t replicate) const {
  EtaStream stream(m_, alpha_, step_, count_, fbm_ ? &*fbm_ : nullptr, seed);
  return stream.get(replicate);
}

double continuous_measure(const EtaPaths& eta, double horizon, std::size_t stride) {
  const std::size_t last = last_index(eta, horizon);
  if (eta.m == 1) return std::exp(max_min_1d(eta, last, stride));
  return orthant_union_exp_measure(collect(eta, last, stride, 0.0));
}

double grid_measure(const EtaPaths& eta, double d, double horizon) {
  const std::size_t stride = eta.count == 1 ? 1 : exact_stride(d, eta.step, "d");
  return continuous_measure(eta, horizon, stride);
}

double joint_measure(const EtaPaths& eta, double d, double x, double y, double horizon,
                     std::size_t stride) {
  const std::size_t last = last_index(eta, horizon);
  const std::size_t gstride = eta.count == 1 ? 1 : exact_stride(d, eta.step, "d");
  if (eta.m == 1)
    return std::exp(std::min(max_min_1d(eta, last, stride) - x, max_min_1d(eta, last, gstride) - y));
  return orthant_intersection_exp_measure(collect(eta, last, stride, x),
                                          collect(eta, last, gstride, y));
}

PickandsEstimate estimate_H(const PickandsRequest& req) {
  validate(req);
  const auto [finest, levels] = step_plan(req);
  exact_stride(req.lambda, finest, "lambda");
  const std::array<double, 1> horizons{req.lambda};
  const auto mo = accumulate(req, finest, horizons, levels);

  int chosen = levels - 1;
  bool converged = levels == 1;
  for (int l = 1; l < levels && !converged; ++l) {
    const double prev = mo[static_cast<std::size_t>(l - 1)].sum;
    const double cur = mo[static_cast<std::size_t>(l)].sum;
    if (std::abs(cur - prev) < kStepTolerance * std::abs(prev)) {
      chosen = l;
      converged = true;
    }
  }
  const double step = finest * static_cast<double>(std::size_t{1} << (levels - 1 - chosen));
  auto e = make_estimate(req, req.lambda, step, mo[static_cast<std::size_t>(chosen)]);
  e.caveat = caveat_for(req.kind, converged);
  return e;
}

std::vector<PickandsEstimate> estimate_schedule(const PickandsRequest& req) {
  validate(req);
  const auto [finest, levels] = step_plan(req);
  const std::array<double, 3> horizons{req.lambda / 4.0, req.lambda / 2.0, req.lambda};
  for (double h : horizons) exact_stride(h, finest, "the lambda schedule");
  const auto mo = accumulate(req, finest, horizons, levels);
  auto cell = [&](std::size_t h, int l) { return mo[h * static_cast<std::size_t>(levels) + static_cast<std::size_t>(l)]; };

  int chosen = levels - 1;
  bool converged = levels == 1;
  for (int l = 1; l < levels && !converged; ++l) {
    const double prev = cell(2, l - 1).sum, cur = cell(2, l).sum;
    if (std::abs(cur - prev) < kStepTolerance * std::abs(prev)) {
      chosen = l;
      converged = true;
    }
  }
  const double step = finest * static_cast<double>(std::size_t{1} << (levels - 1 - chosen));
  std::vector<PickandsEstimate> out;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    out.push_back(make_estimate(req, horizons[h], step, cell(h, chosen)));
    out.back().caveat = caveat_for(req.kind, converged);
  }
  const double slope = slope_extrapolate(out);
  for (auto& e : out) e.slope = slope;
  return out;
}

double slope_extrapolate(std::span<const double> lambdas, std::span<const double> values) {
  if (lambdas.size() != values.size()) throw LengthMismatch("slope: lambdas and values differ in length");
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lambdas[a] < lambdas[b]; });
  std::vector<double> distinct;
  for (auto i : order)
    if (distinct.empty() || lambdas[i] != distinct.back()) distinct.push_back(lambdas[i]);
  if (distinct.size() < 3) throw InsufficientData("slope extrapolation needs at least three distinct lambda values");

  // Larger half of the distinct lambda values (rounded up).
  const double cutoff = distinct[distinct.size() / 2];
  double sx = 0, sy = 0, n = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] >= cutoff) {
      sx += lambdas[i];
      sy += values[i];
      n += 1;
    }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] >= cutoff) {
      sxx += (lambdas[i] - mx) * (lambdas[i] - mx);
      sxy += (lambdas[i] - mx) * (values[i] - my);
    }
  const double slope = sxy / sxx;
  if (!(slope > 0.0)) throw InsufficientData("extrapolated slope is not positive");
  return slope;
}

double slope_extrapolate(std::span<const PickandsEstimate> estimates) {
  std::vector<double> l, v;
  for (const auto& e : estimates) {
    l.push_back(e.lambda);
    v.push_back(e.value_of_lambda);
  }
  return slope_extrapolate(l, v);
}

std::vector<JointTableRow> estimate_joint_table(int m, double alpha, double d,
                                                std::span<const double> zs, double lambda_max,
                                                double time_step, std::size_t replicates,
                                                std::uint64_t seed) {
  PickandsRequest req;
  req.kind = PickandsKind::Joint;
  req.m = m;
  req.alpha = alpha;
  req.lambda = lambda_max;
  req.d = d;
  req.replicates = replicates;
  req.seed = seed;
  req.time_step = time_step > 0.0 ? time_step : std::min(d, lambda_max) / 64.0;
  validate(req);
  if (zs.empty()) throw InsufficientData("joint table needs at least one z value");
  const std::array<double, 3> horizons{lambda_max / 4.0, lambda_max / 2.0, lambda_max};
  for (double h : horizons) exact_stride(h, req.time_step, "the lambda schedule");
  const std::vector<double> shifts(zs.begin(), zs.end());
  const auto mo = accumulate(req, req.time_step, horizons, 1, shifts);

  std::vector<JointTableRow> rows;
  for (std::size_t z = 0; z < zs.size(); ++z) {
    std::array<double, 3> values{};
    for (std::size_t h = 0; h < 3; ++h)
      values[h] = mo[h * zs.size() + z].sum / static_cast<double>(replicates);
    rows.push_back({zs[z], slope_extrapolate(horizons, values)});
  }
  return rows;
}

void write_estimate_header(std::ostream& os) {
  os << "kind,m,alpha,lambda,d,x,y,step,reps,value,slope,ci\n";
}

void write_estimate_row(std::ostream& os, const PickandsEstimate& e) {
  const auto old_precision = os.precision(12);
  os << to_string(e.kind) << ',' << e.m << ',' << e.alpha << ',' << e.lambda << ',' << e.d << ','
     << e.x << ',' << e.y << ',' << e.time_step << ',' << e.replicates << ',' << e.value_of_lambda
     << ',' << e.slope << ',' << e.ci_halfwidth << '\n';
  os.precision(old_precision);
}

}  // namespace osmax

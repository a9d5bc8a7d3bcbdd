#include "osmax/correlation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "osmax/errors.hpp"

namespace osmax {

namespace {

constexpr double kConvexitySlack = 1e-9;
constexpr double kLocalTolerance = 0.1;

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("model: missing key '" + key + "'");
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("model: key '" + key + "' is not a number: '" + it->second + "'");
  }
}

}  // namespace

std::string_view to_string(CorrelationFamily family) {
  switch (family) {
    case CorrelationFamily::ExpAlpha: return "exp_alpha";
    case CorrelationFamily::PolyaLog: return "polya_log";
    case CorrelationFamily::PolyaLogInfty: return "polya_log_infty";
  }
  return "unknown";
}

std::string_view to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::T21: return "T21";
    case Theorem::T22: return "T22";
    case Theorem::T23: return "T23";
    case Theorem::T24: return "T24";
  }
  return "unknown";
}

CorrelationFamily parse_family(std::string_view name) {
  if (name == "exp_alpha") return CorrelationFamily::ExpAlpha;
  if (name == "polya_log") return CorrelationFamily::PolyaLog;
  if (name == "polya_log_infty") return CorrelationFamily::PolyaLogInfty;
  throw ConfigError("unknown correlation family '" + std::string(name) + "'");
}

Theorem parse_theorem(std::string_view name) {
  if (name == "T21") return Theorem::T21;
  if (name == "T22") return Theorem::T22;
  if (name == "T23") return Theorem::T23;
  if (name == "T24") return Theorem::T24;
  throw ConfigError("unknown theorem '" + std::string(name) + "' (expected T21..T24)");
}

CorrelationModel CorrelationModel::exp_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw ValidationFailure("exp_alpha: alpha must lie in (0, 2]");
  return {CorrelationFamily::ExpAlpha, alpha, 0.0};
}

CorrelationModel CorrelationModel::polya_log(double r, double alpha) {
  if (!(r > 0.0 && std::isfinite(r))) throw ValidationFailure("polya_log: r must be positive and finite");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ValidationFailure("polya_log: alpha must lie in (0, 1] for the Polya construction");
  return {CorrelationFamily::PolyaLog, alpha, r};
}

CorrelationModel CorrelationModel::polya_log_infty(double beta, double alpha) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationFailure("polya_log_infty: beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ValidationFailure("polya_log_infty: alpha must lie in (0, 1] for the Polya construction");
  return {CorrelationFamily::PolyaLogInfty, alpha, beta};
}

double CorrelationModel::operator()(double t) const noexcept {
  const double s = std::pow(std::abs(t), alpha_);
  switch (family_) {
    case CorrelationFamily::ExpAlpha:
      return std::exp(-s);
    case CorrelationFamily::PolyaLog:
      // r / ln(e^r + r e^r s) = 1 / (1 + log1p(r s) / r)
      return 1.0 / (1.0 + std::log1p(param_ * s) / param_);
    case CorrelationFamily::PolyaLogInfty:
      // (ln(e + (e / beta) s))^-beta = (1 + log1p(s / beta))^-beta
      return std::pow(1.0 + std::log1p(s / param_), -param_);
  }
  return 0.0;
}

std::map<std::string, std::string> CorrelationModel::to_key_values() const {
  std::map<std::string, std::string> kv{{"family", std::string(to_string(family_))},
                                        {"alpha", format_number(alpha_)}};
  if (family_ == CorrelationFamily::PolyaLog) kv["r"] = format_number(param_);
  if (family_ == CorrelationFamily::PolyaLogInfty) kv["beta"] = format_number(param_);
  return kv;
}

CorrelationModel CorrelationModel::from_key_values(const std::map<std::string, std::string>& kv) {
  auto it = kv.find("family");
  if (it == kv.end()) throw ConfigError("model: missing key 'family'");
  const auto family = parse_family(it->second);
  const double alpha = kv.count("alpha") ? parse_number(kv, "alpha") : 1.0;
  switch (family) {
    case CorrelationFamily::ExpAlpha: return exp_alpha(alpha);
    case CorrelationFamily::PolyaLog: return polya_log(parse_number(kv, "r"), alpha);
    case CorrelationFamily::PolyaLogInfty: return polya_log_infty(parse_number(kv, "beta"), alpha);
  }
  throw ConfigError("model: unsupported family");
}

double long_range_limit(const CorrelationModel& model) noexcept {
  switch (model.family()) {
    case CorrelationFamily::ExpAlpha: return 0.0;
    case CorrelationFamily::PolyaLog: return model.param();
    case CorrelationFamily::PolyaLogInfty: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::array<double, 3> long_range_probe(const CorrelationModel& model) noexcept {
  std::array<double, 3> out{};
  const std::array<double, 3> lags{1e3, 1e6, 1e9};
  for (std::size_t i = 0; i < lags.size(); ++i) out[i] = model(lags[i]) * std::log(lags[i]);
  return out;
}

void ValidationReport::require() const {
  if (passed()) return;
  std::string msg = std::string(to_string(theorem)) + ": ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) msg += "; ";
    msg += violations[i];
  }
  throw ValidationFailure(msg);
}

ValidationReport validate_for_theorem(const CorrelationModel& model, Theorem theorem) {
  ValidationReport report{theorem, {}};
  auto& v = report.violations;
  const double alpha = model.alpha();

  // Local behaviour at the origin.
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const double ta = std::pow(t, alpha);
    if (std::abs(1.0 - model(t) - ta) > kLocalTolerance * ta) {
      v.push_back("1 - r(t) deviates from t^alpha by more than 10% at t=" + format_number(t));
      break;
    }
  }
  for (double t = 1e-6; t <= 1e12; t *= 10.0) {
    if (!(model(t) < 1.0)) {
      v.push_back("r(t) < 1 fails at t=" + format_number(t));
      break;
    }
  }

  const double r_long = long_range_limit(model);
  if (theorem != Theorem::T24) {
    if (!std::isfinite(r_long)) v.push_back("r(T)ln T -> inf, theorem requires a finite limit");
    return report;
  }

  if (std::isfinite(r_long))
    v.push_back("r(T)ln T -> " + format_number(r_long) + " not inf");
  if (alpha > 1.0) v.push_back("alpha must lie in (0, 1]");

  // Convexity on [0, inf): second differences at three resolutions.
  bool convex = true;
  for (double h : {1e-3, 1e-1, 10.0}) {
    for (int k = 1; k < 1000 && convex; ++k) {
      const double t = k * h;
      if (model(t - h) - 2.0 * model(t) + model(t + h) < -kConvexitySlack) convex = false;
    }
  }
  if (!convex) v.push_back("r(t) is not convex on the probe lattice");

  bool decreasing = true;
  double prev = model(1.0);
  for (double t = 10.0; t <= 1e12; t *= 10.0) {
    const double cur = model(t);
    if (!(cur < prev)) decreasing = false;
    prev = cur;
  }
  if (!decreasing) v.push_back("r(t) does not decrease towards 0");

  bool up = true, down = true;
  prev = model(1e3) * std::log(1e3);
  for (double t = 1e4; t <= 1e12; t *= 10.0) {
    const double cur = model(t) * std::log(t);
    up = up && cur >= prev;
    down = down && cur <= prev;
    prev = cur;
  }
  if (!up && !down) v.push_back("r(t)ln t is not monotone for large t");
  return report;
}

}  // namespace osmax

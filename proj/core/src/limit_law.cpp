#include "osmax/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "osmax/errors.hpp"
#include "osmax/quadrature.hpp"

namespace osmax {

namespace {

constexpr double kJointSlack = 1e-12;

/// E exp(-S exp(-r + sqrt(2 r m) N)).
double mixed_exponential(double S, double r, int m, int order) {
  if (S == 0.0) return 1.0;
  if (r == 0.0) return std::exp(-S);
  const double c = std::sqrt(2.0 * r * m);
  // The integrand drops from 1 to 0 over a window of width ~1/c around the
  // point where the exponent reaches one; the panels are centred there.
  const double center = (r - std::log(S)) / c;
  return normal_expectation([&](double z) { return std::exp(-S * std::exp(-r + c * z)); }, order, center,
                            1.0 / c);
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double binomial(int n, int m) {
  if (m < 0 || m > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
}

double normal_tail(double u) noexcept { return 0.5 * std::erfc(u / std::numbers::sqrt2); }
double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalizingConstants::b_star(GridRegime regime) const {
  switch (regime) {
    case GridRegime::Sparse: return b_sparse;
    case GridRegime::Dense: return b_cont;
    case GridRegime::Pickands:
      if (!b_pick) throw DomainError("Pickands-grid centering needs the grid constant H_{d,m,alpha}");
      return *b_pick;
  }
  return b_cont;
}

NormalizingConstants norming_constants(int m, int n, double alpha, double T, double p, double H_cont,
                                       std::optional<double> H_grid) {
  if (!(T > std::numbers::e)) throw DomainError("norming constants need T > e");
  if (m < 1 || m > n) throw DomainError("norming constants need 1 <= m <= n");
  if (!(H_cont > 0.0)) throw DomainError("H_cont must be positive");
  if (!(p > 0.0)) throw DomainError("grid step p must be positive");
  if (H_grid && !(*H_grid > 0.0)) throw DomainError("H_grid must be positive");

  NormalizingConstants c;
  c.m = m;
  c.n = n;
  c.alpha = alpha;
  c.T = T;
  c.p = p;
  c.H_cont = H_cont;
  c.H_grid = H_grid;

  const double a = std::sqrt(2.0 * m * std::log(T));
  const double comb = binomial(n, m);
  const double gauss = std::pow(2.0 * std::numbers::pi, -0.5 * m);
  const double lead = a / m;
  c.a = a;
  c.b_cont = lead + std::log(std::pow(a, 2.0 / alpha - m) * comb * H_cont * gauss) / a;
  c.b_sparse = lead + std::log(std::pow(a, -static_cast<double>(m)) * comb * gauss / p) / a;
  if (H_grid) c.b_pick = lead + std::log(std::pow(a, 2.0 / alpha - m) * comb * *H_grid * gauss) / a;
  return c;
}

JointConstantTable::JointConstantTable(int m, std::vector<double> z, std::vector<double> value)
    : m_(m), z_(std::move(z)), value_(std::move(value)) {
  if (z_.size() != value_.size()) throw LengthMismatch("joint table: z and value differ in length");
  if (z_.size() < 2) throw InsufficientData("joint table needs at least two rows");
  for (std::size_t i = 1; i < z_.size(); ++i)
    if (!(z_[i] > z_[i - 1])) throw DomainError("joint table: z must be strictly increasing");
  for (double v : value_)
    if (!(v >= 0.0)) throw InvalidJointConstant("joint table: constants must be nonnegative");
}

JointConstantTable JointConstantTable::read_csv(std::istream& is, int m) {
  std::string line;
  std::vector<double> z, v;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.find_first_of("0123456789") == std::string::npos || line.front() == 'z') continue;
    }
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(row >> a >> comma >> b) || comma != ',')
      throw ConfigError("joint table: malformed row '" + line + "'");
    z.push_back(a);
    v.push_back(b);
  }
  return {m, std::move(z), std::move(v)};
}

void JointConstantTable::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "z,value\n";
  for (std::size_t i = 0; i < z_.size(); ++i) os << z_[i] << ',' << value_[i] << '\n';
  os.precision(old_precision);
}

double JointConstantTable::operator()(double x, double y) const {
  const double z = x - y;
  if (z < z_.front() - 1e-12 || z > z_.back() + 1e-12)
    throw DomainError("joint table: x - y = " + std::to_string(z) + " outside the tabulated range");
  auto it = std::upper_bound(z_.begin(), z_.end(), z);
  std::size_t hi = static_cast<std::size_t>(it - z_.begin());
  hi = std::clamp<std::size_t>(hi, 1, z_.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = std::clamp((z - z_[lo]) / (z_[hi] - z_[lo]), 0.0, 1.0);
  const double base = (1.0 - w) * value_[lo] + w * value_[hi];
  return std::exp(-m_ * y) * base;
}

std::function<double(double, double)> pickands_grid_joint_term(const JointConstantTable& table,
                                                               double H_cont, double H_grid) {
  const double lc = std::log(H_cont), lg = std::log(H_grid);
  return [table, lc, lg](double x, double y) { return table(lc + x, lg + y); };
}

double limit_cdf(const LimitLawSpec& spec, double x, double y) {
  if (spec.quadrature_order < 16) throw DomainError("quadrature order must be >= 16");
  if (spec.m < 1 || spec.m > spec.n) throw DomainError("limit law needs 1 <= m <= n");
  const double r = spec.r_long;
  switch (spec.theorem) {
    case Theorem::T24:
      return normal_cdf(std::min(x, y));
    case Theorem::T23:
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("limit law needs finite r >= 0");
      return clamp_probability(mixed_exponential(std::exp(-std::min(x, y)), r, spec.m, spec.quadrature_order));
    case Theorem::T21:
    case Theorem::T22: {
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("limit law needs finite r >= 0");
      const double ex = std::exp(-x), ey = std::exp(-y);
      double joint = 0.0;
      if (spec.theorem == Theorem::T22) {
        if (!spec.joint_term) throw InvalidJointConstant("Pickands-grid law needs a joint constant provider");
        joint = spec.joint_term(x, y);
        if (!(joint >= 0.0))
          throw InvalidJointConstant("joint constant is negative at (" + std::to_string(x) + ", " +
                                     std::to_string(y) + ")");
        if (joint > std::min(ex, ey) * (1.0 + kJointSlack) + kJointSlack)
          throw InvalidJointConstant("joint constant " + std::to_string(joint) +
                                     " would push the joint law above a marginal at (" +
                                     std::to_string(x) + ", " + std::to_string(y) + ")");
      }
      return clamp_probability(mixed_exponential(ex + ey - joint, r, spec.m, spec.quadrature_order));
    }
  }
  return 0.0;
}

double marginal_cdf(double r, int m, double x, int quadrature_order) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("marginal law needs finite r >= 0");
  if (quadrature_order < 16) throw DomainError("quadrature order must be >= 16");
  return clamp_probability(mixed_exponential(std::exp(-x), r, m, quadrature_order));
}

TailApproximation tail_probability(double u, double S, int m, int n, double alpha, double H_cont) {
  if (!(u > 0.0) || !(S > 0.0)) throw DomainError("tail probability needs u > 0 and S > 0");
  TailApproximation t;
  t.value = binomial(n, m) * S * H_cont * std::pow(u, 2.0 / alpha) * std::pow(normal_tail(u), m);
  t.asymptotic = t.value < 0.5;
  return t;
}

}  // namespace osmax

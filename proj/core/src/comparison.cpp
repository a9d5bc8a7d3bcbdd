#include "osmax/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <json.hpp>

#include "osmax/errors.hpp"
#include "osmax/parallel.hpp"
#include "osmax/quadrature.hpp"
#include "osmax/random.hpp"

namespace osmax {

namespace {

constexpr double kEdge = 1e-12;
constexpr long long kBlock = 4096;

void check_correlation(const Eigen::MatrixXd& s, int d, const char* name) {
  if (s.rows() != d || s.cols() != d)
    throw DimensionMismatch(std::string(name) + " must be " + std::to_string(d) + "x" + std::to_string(d));
  for (int i = 0; i < d; ++i) {
    if (std::abs(s(i, i) - 1.0) > 1e-12) throw DomainError(std::string(name) + " must have unit diagonal");
    for (int j = 0; j < d; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-12) throw DomainError(std::string(name) + " must be symmetric");
      if (i != j && !(std::abs(s(i, j)) < 1.0))
        throw DomainError(std::string(name) + " off-diagonal entries must lie in (-1, 1)");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw DomainError(std::string(name) + " is not positive semidefinite");
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd out(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != rows) throw DimensionMismatch("matrix rows must be square");
    for (Eigen::Index k = 0; k < rows; ++k) out(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void ComparisonInstance::validate() const {
  if (d < 1) throw DomainError("comparison instance needs d >= 1");
  if (n < 1 || m < 1 || m > n) throw DomainError("comparison instance needs 1 <= m <= n");
  check_correlation(sigma0, d, "sigma0");
  check_correlation(sigma1, d, "sigma1");
  if (u.size() != d) throw DimensionMismatch("threshold vector must have length d");
}

ComparisonInstance ComparisonInstance::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("comparison instance: ") + e.what());
  }
  ComparisonInstance inst;
  try {
    inst.d = j.at("d").get<int>();
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.sigma0 = matrix_from_json(j.at("sigma0"));
    inst.sigma1 = matrix_from_json(j.at("sigma1"));
    const auto& u = j.at("u");
    inst.u.resize(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) inst.u(static_cast<Eigen::Index>(i)) = u.at(i).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("comparison instance: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string ComparisonInstance::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["n"] = n;
  j["m"] = m;
  j["sigma0"] = matrix_to_json(sigma0);
  j["sigma1"] = matrix_to_json(sigma1);
  j["u"] = std::vector<double>(u.data(), u.data() + u.size());
  return j.dump(2);
}

double comparison_bound(const ComparisonInstance& inst) {
  inst.validate();
  for (int i = 0; i < inst.d; ++i)
    if (!(inst.u(i) > 0.0)) throw DomainError("comparison bound needs positive thresholds");

  // With m counted from the top, exceeding u needs m of the n columns above it.
  const double k = inst.m;
  double total = 0.0;
  for (int i = 0; i < inst.d; ++i) {
    for (int j = i + 1; j < inst.d; ++j) {
      const double s0 = inst.sigma0(i, j), s1 = inst.sigma1(i, j);
      const double diff = std::abs(s0 - s1);
      if (diff == 0.0) continue;
      if (std::max(s0, s1) >= 1.0 - kEdge)
        throw SingularPair("correlation pair (" + std::to_string(i) + ", " + std::to_string(j) + ") reaches 1");
      const double uu = inst.u(i) * inst.u(i) + inst.u(j) * inst.u(j);
      auto integrand = [&](double h) {
        const double delta = std::clamp(h * s0 + (1.0 - h) * s1, -1.0 + kEdge, 1.0 - kEdge);
        return std::pow(1.0 - delta, -0.5 * k) * std::exp(-k * uu / (2.0 * (1.0 + std::abs(delta))));
      };
      total += diff * integrate_adaptive(integrand, 0.0, 1.0, 1e-10);
    }
  }
  return std::pow(inst.u(0), -2.0 * (k - 1.0)) * total;
}

Eigen::MatrixXd correlation_factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw CholeskyFailure("covariance matrix is not positive semidefinite");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

MonteCarloProbability mc_order_stat_cdf(const Eigen::MatrixXd& sigma, int n, int m, const Eigen::VectorXd& u,
                                        long long replicates, std::uint64_t seed) {
  const auto d = sigma.rows();
  if (sigma.cols() != d || u.size() != d) throw DimensionMismatch("sigma must be d x d and u of length d");
  if (n < 1 || m < 1 || m > n) throw DomainError("need 1 <= m <= n");
  if (replicates < 10000) throw DomainError("Monte Carlo oracle needs at least 1e4 replicates");
  const Eigen::MatrixXd L = correlation_factor(sigma);

  const auto blocks = static_cast<std::size_t>((replicates + kBlock - 1) / kBlock);
  std::vector<long long> hits(blocks, 0);
  parallel_chunks(blocks, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd z(d, n), x(d, n);
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::size_t b = begin; b < end; ++b) {
      NormalStream normal(split_seed(seed, 0x636f6d70ULL, b));
      const long long first = static_cast<long long>(b) * kBlock;
      const long long count = std::min(kBlock, replicates - first);
      long long local = 0;
      for (long long r = 0; r < count; ++r) {
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index i = 0; i < d; ++i) z(i, c) = normal();
        x.noalias() = L * z;
        bool below = true;
        for (Eigen::Index i = 0; i < d && below; ++i) {
          for (Eigen::Index c = 0; c < n; ++c) row[static_cast<std::size_t>(c)] = x(i, c);
          std::nth_element(row.begin(), row.begin() + (m - 1), row.end(), std::greater<>());
          below = row[static_cast<std::size_t>(m - 1)] <= u(i);
        }
        local += below ? 1 : 0;
      }
      hits[b] = local;
    }
  });
  long long total = 0;
  for (long long h : hits) total += h;
  MonteCarloProbability out;
  out.replicates = replicates;
  out.p = static_cast<double>(total) / static_cast<double>(replicates);
  out.se = std::sqrt(std::max(out.p * (1.0 - out.p), 0.0) / static_cast<double>(replicates));
  return out;
}

}  // namespace osmax

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osmax/correlation.hpp"
#include "osmax/order_stats.hpp"

namespace osmax {

enum class ConstantsSource { Table, Estimated };

struct ConstantsConfig {
  ConstantsSource source = ConstantsSource::Table;
  /// H_{m,alpha}; when absent the bundled classical values are used (m = 1, alpha in {1, 2}).
  std::optional<double> H_cont;
  /// H_{d,m,alpha}, Pickands-grid regime only.
  std::optional<double> H_grid;
  /// CSV "z,value" of H^{z,0}_{d,m,alpha}, Pickands-grid regime only.
  std::optional<std::filesystem::path> joint_table;
  std::size_t estimate_replicates = 20000;
  double estimate_lambda = 4.0;
};

/// Everything needed to run one convergence experiment. Read from an INI-style
/// file with sections [model], [experiment], [probes], [constants], [output].
struct ExperimentConfig {
  CorrelationModel model = CorrelationModel::exp_alpha(1.0);
  Theorem theorem = Theorem::T21;
  int m = 1;
  int n = 1;
  std::vector<double> T_schedule;
  GridRegime regime = GridRegime::Sparse;
  /// Sparse/dense: target ratio p (2/m ln T)^{1/alpha}. Pickands: d.
  double grid_param = 10.0;
  double epsilon_cont = 0.05;
  std::size_t replicates = 5000;
  std::uint64_t master_seed = 1;
  std::vector<std::pair<double, double>> probes;
  /// Also evaluate the continuous maximum on a lattice twice as fine.
  bool bias_probe = true;
  int quadrature_order = 64;
  ConstantsConfig constants;
  std::filesystem::path output_dir = "osmax-out";
  bool write_maxima = true;

  /// Throws ConfigError on an invalid schedule, replicate count or probe grid.
  void validate() const;
};

/// Default probe grid {-2, ..., 3}^2.
std::vector<std::pair<double, double>> default_probes();

/// Comma separated list of reals.
std::vector<double> parse_real_list(const std::string& text);

ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void write_experiment_config(std::ostream& os, const ExperimentConfig& config);

}  // namespace osmax

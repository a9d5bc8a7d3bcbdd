#include "osmax/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "osmax/errors.hpp"

namespace osmax {

namespace pt = boost::property_tree;

namespace {

template <typename V>
V get(const pt::ptree& tree, const std::string& key, V fallback) {
  try {
    return tree.get<V>(key, fallback);
  } catch (const pt::ptree_error& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

}  // namespace

std::vector<std::pair<double, double>> default_probes() {
  std::vector<std::pair<double, double>> out;
  for (int x = -2; x <= 3; ++x)
    for (int y = -2; y <= 3; ++y) out.emplace_back(x, y);
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, [](char c) { return c == ','; });
  std::vector<double> out;
  for (auto& part : parts) {
    boost::algorithm::trim(part);
    if (part.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size()) throw ConfigError("not a number: '" + part + "'");
    out.push_back(v);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (m < 1 || m > n) throw ConfigError("need 1 <= m <= n");
  if (T_schedule.empty()) throw ConfigError("T schedule is empty");
  for (std::size_t i = 0; i < T_schedule.size(); ++i) {
    if (!(T_schedule[i] > std::numbers::e * std::numbers::e))
      throw ConfigError("every T must exceed e^2");
    if (i > 0 && !(T_schedule[i] > T_schedule[i - 1])) throw ConfigError("T schedule must be strictly increasing");
  }
  if (replicates < 1000) throw ConfigError("CDF experiments need at least 1000 replicates");
  if (probes.empty()) throw ConfigError("probe grid is empty");
  if (!(epsilon_cont > 0.0)) throw ConfigError("epsilon_cont must be positive");
  if (!(grid_param > 0.0)) throw ConfigError("grid parameter must be positive");
  if (quadrature_order < 16) throw ConfigError("quadrature order must be >= 16");
}

ExperimentConfig parse_experiment_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig c;
  std::map<std::string, std::string> model_kv;
  if (auto model = tree.get_child_optional("model"))
    for (const auto& [key, value] : *model) model_kv[key] = value.data();
  if (!model_kv.empty()) c.model = CorrelationModel::from_key_values(model_kv);

  c.theorem = parse_theorem(get<std::string>(tree, "experiment.theorem", "T21"));
  c.m = get(tree, "experiment.m", 1);
  c.n = get(tree, "experiment.n", 1);
  c.T_schedule = parse_real_list(get<std::string>(tree, "experiment.T", ""));
  c.regime = parse_regime(get<std::string>(tree, "experiment.regime", "sparse"));
  c.grid_param = get(tree, "experiment.grid_param", c.regime == GridRegime::Dense ? 0.1 : 10.0);
  c.epsilon_cont = get(tree, "experiment.epsilon_cont", 0.05);
  c.replicates = get<std::size_t>(tree, "experiment.replicates", 5000);
  c.master_seed = get<std::uint64_t>(tree, "experiment.seed", 1);
  c.bias_probe = parse_bool(get<std::string>(tree, "experiment.bias_probe", "true"));
  c.quadrature_order = get(tree, "experiment.quadrature_order", 64);

  const auto px = get<std::string>(tree, "probes.x", "");
  const auto py = get<std::string>(tree, "probes.y", "");
  if (px.empty() && py.empty()) {
    c.probes = default_probes();
  } else {
    const auto xs = parse_real_list(px.empty() ? py : px);
    const auto ys = parse_real_list(py.empty() ? px : py);
    for (double x : xs)
      for (double y : ys) c.probes.emplace_back(x, y);
  }

  const auto source = get<std::string>(tree, "constants.source", "table");
  if (source == "table") c.constants.source = ConstantsSource::Table;
  else if (source == "estimated") c.constants.source = ConstantsSource::Estimated;
  else throw ConfigError("constants.source must be 'table' or 'estimated'");
  if (auto v = tree.get_optional<double>("constants.H_cont")) c.constants.H_cont = *v;
  if (auto v = tree.get_optional<double>("constants.H_grid")) c.constants.H_grid = *v;
  if (auto v = tree.get_optional<std::string>("constants.joint_table")) c.constants.joint_table = *v;
  c.constants.estimate_replicates = get<std::size_t>(tree, "constants.estimate_replicates", 20000);
  c.constants.estimate_lambda = get(tree, "constants.estimate_lambda", 4.0);

  c.output_dir = get<std::string>(tree, "output.dir", "osmax-out");
  c.write_maxima = parse_bool(get<std::string>(tree, "output.write_maxima", "true"));

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  auto config = parse_experiment_config(in);
  // Relative table paths are taken relative to the config file.
  if (config.constants.joint_table && config.constants.joint_table->is_relative())
    config.constants.joint_table = path.parent_path() / *config.constants.joint_table;
  return config;
}

void write_experiment_config(std::ostream& os, const ExperimentConfig& c) {
  const auto old_precision = os.precision(17);
  os << "[model]\n";
  for (const auto& [key, value] : c.model.to_key_values()) os << key << " = " << value << '\n';
  os << "\n[experiment]\n"
     << "theorem = " << to_string(c.theorem) << '\n'
     << "m = " << c.m << '\n'
     << "n = " << c.n << '\n'
     << "T = " << join(c.T_schedule) << '\n'
     << "regime = " << to_string(c.regime) << '\n'
     << "grid_param = " << c.grid_param << '\n'
     << "epsilon_cont = " << c.epsilon_cont << '\n'
     << "replicates = " << c.replicates << '\n'
     << "seed = " << c.master_seed << '\n'
     << "bias_probe = " << (c.bias_probe ? "true" : "false") << '\n'
     << "quadrature_order = " << c.quadrature_order << '\n';
  std::vector<double> xs, ys;
  for (const auto& [x, y] : c.probes) {
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    if (std::find(ys.begin(), ys.end(), y) == ys.end()) ys.push_back(y);
  }
  os << "\n[probes]\nx = " << join(xs) << "\ny = " << join(ys) << '\n';
  os << "\n[constants]\nsource = " << (c.constants.source == ConstantsSource::Table ? "table" : "estimated") << '\n';
  if (c.constants.H_cont) os << "H_cont = " << *c.constants.H_cont << '\n';
  if (c.constants.H_grid) os << "H_grid = " << *c.constants.H_grid << '\n';
  if (c.constants.joint_table) os << "joint_table = " << c.constants.joint_table->string() << '\n';
  os << "estimate_replicates = " << c.constants.estimate_replicates << '\n'
     << "estimate_lambda = " << c.constants.estimate_lambda << '\n';
  os << "\n[output]\ndir = " << c.output_dir.string() << '\n'
     << "write_maxima = " << (c.write_maxima ? "true" : "false") << '\n';
  os.precision(old_precision);
}

}  // namespace osmax

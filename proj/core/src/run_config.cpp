#include "actsamp/run_config.hpp"

#include <istream>
#include <sstream>

#include "actsamp/errors.hpp"

namespace actsamp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t idx = 0;
    const int v = std::stoi(value, &idx);
    if (idx != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t idx = 0;
    const double v = std::stod(value, &idx);
    if (idx != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t idx = 0;
    const unsigned long long v = std::stoull(value, &idx);
    if (idx != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
  }
}

std::vector<Method> parse_methods(const std::string& value) {
  std::vector<Method> methods;
  std::string token;
  std::istringstream stream(value);
  while (std::getline(stream, token, ',')) {
    token = trim(token);
    if (!token.empty()) methods.push_back(parse_method(token));
  }
  if (methods.empty()) throw ConfigError("methods: empty list");
  return methods;
}

}  // namespace

CharacteristicKind parse_characteristic(const std::string& token) {
  if (token == "linear-total") return CharacteristicKind::LinearTotal;
  if (token == "linear-mean") return CharacteristicKind::LinearMean;
  if (token == "hajek-mean") return CharacteristicKind::HajekMean;
  if (token == "weighted-ratio") return CharacteristicKind::RatioOfWeightedTotals;
  throw ConfigError("unknown characteristic: " + token);
}

SurrogateKind parse_surrogate(const std::string& token) {
  if (token == "linear") return SurrogateKind::LinearLS;
  if (token == "knn") return SurrogateKind::KNearest;
  if (token == "kernel-ridge") return SurrogateKind::KernelRidge;
  throw ConfigError("unknown surrogate: " + token);
}

VarianceMethod parse_variance_method(const std::string& token) {
  if (token == "design") return VarianceMethod::Design;
  if (token == "martingale") return VarianceMethod::Martingale;
  if (token == "bootstrap") return VarianceMethod::Bootstrap;
  throw ConfigError("unknown variance method: " + token);
}

FallbackKind parse_fallback(const std::string& token) {
  if (token == "uniform") return FallbackKind::Uniform;
  if (token == "density") return FallbackKind::Density;
  throw ConfigError("unknown fallback: " + token);
}

Scenario parse_scenario(const std::string& token) {
  if (token == "positive") return Scenario::StrictlyPositive;
  if (token == "zero-mean") return Scenario::ZeroMean;
  throw ConfigError("unknown scenario: " + token);
}

void set_config_key(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "population") {
    if (value != "synthetic" && value != "application")
      throw ConfigError("population must be synthetic or application");
    config.population = value;
  } else if (key == "sigma") {
    config.sigma = parse_real(key, value);
  } else if (key == "r2") {
    config.r2 = parse_real(key, value);
  } else if (key == "scenario") {
    parse_scenario(value);
    config.scenario = value;
  } else if (key == "population_size") {
    config.population_size = parse_int(key, value);
  } else if (key == "primary_levels") {
    config.primary_levels = parse_int(key, value);
  } else if (key == "secondary_levels") {
    config.secondary_levels = parse_int(key, value);
  } else if (key == "data_seed") {
    config.data_seed = parse_u64(key, value);
  } else if (key == "methods") {
    config.methods = parse_methods(value);
  } else if (key == "characteristic") {
    config.characteristic = parse_characteristic(value);
  } else if (key == "fallback") {
    config.fallback = parse_fallback(value);
  } else if (key == "surrogate") {
    config.surrogate = parse_surrogate(value);
  } else if (key == "batch_size") {
    config.batch_size = parse_int(key, value);
  } else if (key == "n_max") {
    config.n_max = parse_int(key, value);
  } else if (key == "replications") {
    config.replications = parse_int(key, value);
  } else if (key == "variance_method") {
    config.variance_method = parse_variance_method(value);
  } else if (key == "bootstrap_replicates") {
    config.bootstrap_replicates = parse_int(key, value);
  } else if (key == "alpha") {
    config.alpha = parse_real(key, value);
  } else if (key == "floor_epsilon") {
    config.floor_epsilon = parse_real(key, value);
  } else if (key == "min_fit_size") {
    config.min_fit_size = parse_int(key, value);
  } else if (key == "cv_folds") {
    config.cv_folds = parse_int(key, value);
  } else if (key == "knn_neighbors") {
    config.knn_neighbors = parse_int(key, value);
  } else if (key == "refit_every") {
    config.refit_every = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    set_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

RunConfig parse_run_config_text(const std::string& text) {
  std::istringstream stream(text);
  return parse_run_config(stream);
}

BenchmarkInput build_input(const RunConfig& config) {
  if (config.population == "synthetic") {
    SyntheticSpec spec;
    spec.population_size = config.population_size;
    spec.kernel_bandwidth = config.sigma;
    spec.target_r2 = config.r2;
    spec.scenario = parse_scenario(config.scenario);
    spec.seed = config.data_seed;
    return make_input(generate_synthetic(spec), spec);
  }
  if (config.population == "application") {
    ApplicationGridSpec spec;
    spec.primary_levels = config.primary_levels;
    spec.secondary_levels = config.secondary_levels;
    return make_input(generate_application_grid(spec));
  }
  throw ConfigError("unknown population: " + config.population);
}

ExperimentSpec build_spec(const RunConfig& config) {
  const bool application = config.population == "application";
  ExperimentSpec spec;
  spec.methods = config.methods;
  spec.characteristic = config.characteristic.value_or(
      application ? CharacteristicKind::RatioOfWeightedTotals : CharacteristicKind::LinearMean);
  spec.surrogate = config.surrogate;
  spec.fallback =
      config.fallback.value_or(application ? FallbackKind::Density : FallbackKind::Uniform);
  spec.batch_size = config.batch_size;
  spec.n_max = config.n_max;
  spec.replications = config.replications;
  spec.variance_method = config.variance_method;
  spec.bootstrap_replicates = config.bootstrap_replicates;
  spec.alpha = config.alpha;
  spec.floor_epsilon = config.floor_epsilon;
  spec.min_fit_size = config.min_fit_size;
  spec.cv_folds = config.cv_folds;
  spec.knn_neighbors = config.knn_neighbors;
  spec.refit_every = config.refit_every;
  spec.seed = config.seed;
  return spec;
}

}  // namespace actsamp

#ifndef ACTSAMP_RUN_CONFIG_HPP
#define ACTSAMP_RUN_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actsamp/experiment.hpp"

namespace actsamp {

// Flat study description read from key=value text ('#' starts a comment,
// blank lines are skipped, unknown keys are rejected).
struct RunConfig {
  // population block
  std::string population = "synthetic";  // synthetic | application
  double sigma = 1.0;                    // generator kernel bandwidth
  double r2 = 0.5;
  std::string scenario = "positive";     // positive | zero-mean
  int population_size = 1000;
  int primary_levels = 50;
  int secondary_levels = 40;
  std::uint64_t data_seed = 1;

  // study block
  std::vector<Method> methods{Method::Active, Method::SrsLinear};
  std::optional<CharacteristicKind> characteristic;  // defaults per population
  std::optional<FallbackKind> fallback;
  SurrogateKind surrogate = SurrogateKind::KernelRidge;
  int batch_size = 10;
  int n_max = 250;
  int replications = 200;
  VarianceMethod variance_method = VarianceMethod::Design;
  int bootstrap_replicates = 500;
  double alpha = 0.05;
  double floor_epsilon = kDefaultFloorEpsilon;
  int min_fit_size = 10;
  int cv_folds = 5;
  int knn_neighbors = 5;
  int refit_every = 1;
  std::uint64_t seed = 0;
};

// Applies one key=value pair; throws ConfigError on unknown keys or
// unparseable values.  Shared by the file parser and CLI overrides.
void set_config_key(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_text(const std::string& text);

// Token parsers used by set_config_key and the command line.
CharacteristicKind parse_characteristic(const std::string& token);
SurrogateKind parse_surrogate(const std::string& token);
VarianceMethod parse_variance_method(const std::string& token);
FallbackKind parse_fallback(const std::string& token);
Scenario parse_scenario(const std::string& token);

// Materializes the population named by the config.
BenchmarkInput build_input(const RunConfig& config);

// Assembles the runner spec, resolving per-population defaults (application
// studies default to the ratio characteristic and the density fallback).
ExperimentSpec build_spec(const RunConfig& config);

}  // namespace actsamp

#endif

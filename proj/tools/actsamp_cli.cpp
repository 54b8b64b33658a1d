#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actsamp/active_loop.hpp"
#include "actsamp/errors.hpp"
#include "actsamp/run_config.hpp"

namespace {

using namespace actsamp;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Writes to the named file, or stdout when the path is empty.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    return 0;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  body(out);
  return 0;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    config = parse_run_config(in);
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override needs key=value: " + kv);
    set_config_key(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

int generate_data(const SyntheticSpec& spec, const std::string& out_path) {
  SyntheticData data = generate_synthetic(spec);
  return with_output(out_path, [&](std::ostream& out) {
    out << "i,z,y,p\n";
    for (int i = 0; i < data.z.size(); ++i)
      out << (i + 1) << ',' << fmt(data.z(i)) << ',' << fmt(data.y(i)) << ",1\n";
    out << "# realized_signal_r2 " << fmt(data.realized_signal_r2) << '\n';
  });
}

int run_experiment(const RunConfig& config, const std::string& out_path) {
  BenchmarkOutcome outcome = run_benchmark(build_input(config), build_spec(config));
  return with_output(out_path, [&](std::ostream& out) { write_csv(outcome.table, out); });
}

int run_coverage_cmd(const RunConfig& config, const std::string& out_path) {
  CoverageOutcome outcome = run_coverage(build_input(config), build_spec(config));
  return with_output(out_path, [&](std::ostream& out) { write_csv(outcome.table, out); });
}

// Pilot observations: either one value per line or rows shaped like the
// generate-data output, in which case the third column is used.
std::vector<double> read_pilot_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.empty()) continue;
    const std::string& cell = fields.size() >= 3 ? fields[2] : fields[0];
    try {
      size_t idx = 0;
      const double v = std::stod(cell, &idx);
      if (idx == cell.size()) values.push_back(v);
    } catch (const std::exception&) {
      // header or stray text line
    }
  }
  if (values.size() < 2) throw ConfigError("pilot data needs at least two numeric rows");
  return values;
}

int pilot(const std::string& data_path, double delta) {
  if (!(delta > 0.0)) throw ConfigError("--delta must be positive");
  const std::vector<double> values = read_pilot_values(data_path);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= double(values.size() - 1);
  std::cout << pilot_sample_size(var, delta) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive importance sampling study runner"};
  app.require_subcommand(1);

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "Write a synthetic population as CSV");
  SyntheticSpec gen_spec;
  std::string gen_scenario = "positive";
  std::string gen_out;
  gen->add_option("--sigma", gen_spec.kernel_bandwidth, "Kernel bandwidth");
  gen->add_option("--r2", gen_spec.target_r2, "Signal fraction of the response variance");
  gen->add_option("--scenario", gen_scenario, "positive or zero-mean");
  gen->add_option("--n", gen_spec.population_size, "Population size");
  gen->add_option("--seed", gen_spec.seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV path (stdout when omitted)");

  // shared options of the two study subcommands
  std::string cfg_path, cfg_out;
  std::vector<std::string> cfg_sets;
  auto add_study_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", cfg_path, "key=value study description file");
    cmd->add_option("--set", cfg_sets, "Override one config key (key=value, repeatable)");
    cmd->add_option("--out", cfg_out, "Output CSV path (stdout when omitted)");
  };
  auto* exp = app.add_subcommand("run-experiment", "Empirical RMSE study over methods");
  add_study_options(exp);
  auto* cov = app.add_subcommand("coverage", "Confidence interval coverage study");
  add_study_options(cov);

  // pilot
  auto* pil = app.add_subcommand("pilot", "Sample size from pilot data and a precision target");
  std::string pilot_data;
  double pilot_delta = 0.0;
  pil->add_option("--data", pilot_data, "Pilot CSV or one value per line")->required();
  pil->add_option("--delta", pilot_delta, "Precision target for the standard error")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      gen_spec.scenario = parse_scenario(gen_scenario);
      return generate_data(gen_spec, gen_out);
    }
    if (exp->parsed()) return run_experiment(load_config(cfg_path, cfg_sets), cfg_out);
    if (cov->parsed()) return run_coverage_cmd(load_config(cfg_path, cfg_sets), cfg_out);
    if (pil->parsed()) return pilot(pilot_data, pilot_delta);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const OracleFailure& e) {
    std::cerr << "oracle failure: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "method precondition failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

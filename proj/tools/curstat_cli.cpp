// curstat: estimation, confidence bands, bandwidth selection and simulation
// studies for current status data.

#include "curstat/bandwidth.hpp"
#include "curstat/bootstrap.hpp"
#include "curstat/errors.hpp"
#include "curstat/io.hpp"
#include "curstat/isotonic.hpp"
#include "curstat/likelihood_ratio.hpp"
#include "curstat/simulation.hpp"
#include "curstat/smle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace curstat;

constexpr int exit_config = 2;
constexpr int exit_data = 3;

struct Options {
  std::string input;
  std::string format = "auto";
  std::string method = "smle-studentized";
  std::string kernel = "triweight";
  std::string bandwidth;
  std::string sen_xu_bandwidth;
  double alpha = 0.05;
  int replicates = 1000;
  std::uint64_t seed = 1;
  std::string grid = "100";
  std::optional<double> upper;
  std::optional<double> critical_value;
  double theta_step = 0.001;
  bool refine = false;
  std::int64_t calibration_n = 5000;
  int calibration_reps = 5000;
  std::string out = "-";
  std::string mle_out;
  unsigned threads = 1;
  // bandwidth search
  std::string points = "20";
  double c_step = 0.05;
  double c_max = 5.0;
  std::int64_t subsample = 100;
  std::string pilot;
  std::optional<double> g_bandwidth;
  double under_exponent = 0.25;
  // simulation
  std::string model = "uniform";
  std::int64_t n = 500;
  int simulations = 1000;
  bool json = false;
  bool timing = false;
};

// Writes to the named file, or to stdout for "-".
template <typename Writer>
void emit(const std::string& path, Writer&& writer) {
  if (path == "-" || path.empty()) {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path);
  writer(file);
  if (!file) throw ConfigError("failed writing " + path);
}

CurrentStatusSample load(const Options& o) {
  if (o.input.empty()) throw ConfigError("--input is required");
  return load_dataset(o.input, parse_format(o.format), o.upper);
}

// Default smoothing M n^-1/5 unless a rule is given.
BandwidthSpec bandwidth_or_default(const std::string& text, double upper) {
  return text.empty() ? BandwidthSpec::fixed(upper) : BandwidthSpec::parse(text);
}

BootstrapConfig bootstrap_config(const Options& o) {
  BootstrapConfig config;
  config.replicates = o.replicates;
  config.seed = o.seed;
  config.alpha = o.alpha;
  config.threads = o.threads;
  config.validate();
  return config;
}

LrConfig lr_config(const Options& o) {
  LrConfig config;
  config.critical_value = o.critical_value;
  config.theta_step = o.theta_step;
  config.refine = o.refine;
  config.alpha = o.alpha;
  config.calibration.sample_size = o.calibration_n;
  config.calibration.replicates = o.calibration_reps;
  config.calibration.seed = o.seed;
  config.threads = o.threads;
  config.validate();
  return config;
}

ConfidenceBand band_for(Method method, const CurrentStatusSample& sample, const Eigen::VectorXd& grid,
                        const Options& o, const std::optional<double>& calibrated) {
  const Kernel kernel = parse_kernel(o.kernel);
  switch (method) {
    case Method::smle_classical:
      return ci_smle_classical(sample, kernel, bandwidth_or_default(o.bandwidth, sample.upper()),
                               grid, bootstrap_config(o));
    case Method::smle_studentized:
      return ci_smle_studentized(sample, kernel, bandwidth_or_default(o.bandwidth, sample.upper()),
                                 grid, bootstrap_config(o));
    case Method::sen_xu: {
      const std::string& rule = o.sen_xu_bandwidth.empty() ? o.bandwidth : o.sen_xu_bandwidth;
      return ci_sen_xu(sample, kernel, bandwidth_or_default(rule, sample.upper()), grid,
                       bootstrap_config(o));
    }
    case Method::banerjee_wellner: {
      LrConfig config = lr_config(o);
      if (!config.critical_value) config.critical_value = calibrated;
      return ci_banerjee_wellner(sample, grid, config);
    }
  }
  throw ConfigError("unknown method");
}

void cmd_estimate(const Options& o) {
  const CurrentStatusSample sample = load(o);
  const Eigen::VectorXd grid = parse_grid(o.grid, sample.upper());
  const StepFunction<double> mle = fit_mle(sample);
  const SmoothEstimate smooth(mle, parse_kernel(o.kernel),
                              bandwidth_or_default(o.bandwidth, sample.upper()), sample.upper(),
                              sample.size(), true);
  Eigen::VectorXd mle_on_grid(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) mle_on_grid(i) = mle(grid(i));
  const Eigen::VectorXd curve = smle_curve(smooth, grid);
  emit(o.out, [&](std::ostream& out) { write_table(out, {"t", "mle", "smle"}, {grid, mle_on_grid, curve}); });
  if (!o.mle_out.empty()) {
    emit(o.mle_out, [&](std::ostream& out) {
      write_table(out, {"t", "mle"}, {mle.knots(), mle.values()});
    });
  }
}

void cmd_ci(const Options& o) {
  const CurrentStatusSample sample = load(o);
  const Eigen::VectorXd grid = parse_grid(o.grid, sample.upper());
  const ConfidenceBand band = band_for(parse_method(o.method), sample, grid, o, std::nullopt);
  emit(o.out, [&](std::ostream& out) { write_band(out, band); });
}

void cmd_bandwidth(const Options& o) {
  const CurrentStatusSample sample = load(o);
  const Eigen::VectorXd points = parse_grid(o.points, sample.upper());
  BandwidthSearchConfig config;
  if (!(o.c_step > 0.0) || !(o.c_max >= o.c_step)) throw ConfigError("need 0 < c-step <= c-max");
  config.c_grid.clear();
  for (int k = 1; k * o.c_step <= o.c_max * (1.0 + 1e-12); ++k) config.c_grid.push_back(k * o.c_step);
  config.subsample = o.subsample;
  config.replicates = o.replicates;
  if (!o.pilot.empty()) config.pilot = BandwidthSpec::parse(o.pilot);
  config.g_bandwidth = o.g_bandwidth;
  config.under_exponent = o.under_exponent;
  config.kernel = parse_kernel(o.kernel);
  config.seed = o.seed;
  config.threads = o.threads;

  Eigen::VectorXd c_opt(points.size()), h_opt(points.size());
  // Points whose MSE curve is flat in c say nothing about h and stay out of
  // the fit. At t = M the corrected estimate is the total mass of the MLE for
  // every bandwidth.
  std::vector<double> fit_t, fit_h;
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const LocalBandwidth local = select_local_bandwidth(sample, points(i), config);
    c_opt(i) = local.c_opt;
    h_opt(i) = local.h_opt;
    if (local.mse.maxCoeff() - local.mse.minCoeff() > 1e-9 * local.mse.maxCoeff() + 1e-20) {
      fit_t.push_back(points(i));
      fit_h.push_back(local.h_opt);
    }
  }
  std::optional<AffineFit> line;
  const Eigen::Map<const Eigen::VectorXd> t_used(fit_t.data(), static_cast<Eigen::Index>(fit_t.size()));
  if (t_used.size() >= 2 && t_used.maxCoeff() > t_used.minCoeff()) {
    line = fit_affine_bandwidth(t_used,
                                Eigen::Map<const Eigen::VectorXd>(fit_h.data(), static_cast<Eigen::Index>(fit_h.size())));
  }
  emit(o.out, [&](std::ostream& out) {
    if (line) {
      out << "# a=" << format_number(line->a) << "\n# b=" << format_number(line->b) << '\n';
      out << "# fitted_points=" << fit_t.size() << '\n';
    }
    write_table(out, {"t", "c_opt", "h_opt"}, {points, c_opt, h_opt});
  });
}

void cmd_simulate(const Options& o) {
  CoverageConfig config;
  config.model.truth = parse_truth(o.model);
  config.n = o.n;
  config.grid = parse_grid(o.grid, ModelSpec::upper);
  config.simulations = o.simulations;
  config.seed = o.seed;
  config.threads = o.threads;

  MethodSettings settings;
  settings.method = parse_method(o.method);
  settings.kernel = parse_kernel(o.kernel);
  settings.bandwidth = bandwidth_or_default(
      settings.method == Method::sen_xu && !o.sen_xu_bandwidth.empty() ? o.sen_xu_bandwidth
                                                                        : o.bandwidth,
      ModelSpec::upper);
  settings.bootstrap = bootstrap_config(o);
  settings.lr = lr_config(o);
  const ExperimentResult result = run_coverage(config, settings);
  emit(o.out, [&](std::ostream& out) {
    if (o.json) {
      write_experiment_json(out, result);
    } else {
      write_experiment_csv(out, result);
    }
  });
  if (o.timing) std::cerr << "wall time: " << result.wall_seconds << " s\n";
}

void cmd_compare(const Options& o) {
  const CurrentStatusSample sample = load(o);
  const Eigen::VectorXd grid = parse_grid(o.grid, sample.upper());
  std::optional<double> calibrated = o.critical_value;
  if (!calibrated) calibrated = calibrate_critical_value(lr_config(o));
  std::vector<std::string> header{"t"};
  std::vector<Eigen::VectorXd> columns{grid};
  for (Method method : {Method::smle_classical, Method::smle_studentized, Method::sen_xu,
                        Method::banerjee_wellner}) {
    const ConfidenceBand band = band_for(method, sample, grid, o, calibrated);
    std::string name(to_string(method));
    std::replace(name.begin(), name.end(), '-', '_');
    header.insert(header.end(), {name + "_estimate", name + "_lower", name + "_upper"});
    columns.insert(columns.end(), {band.estimate, band.lower, band.upper});
  }
  emit(o.out, [&](std::ostream& out) { write_table(out, header, columns); });
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--input", o.input, "Dataset file (raw time,indicator or aggregated time,count,positives)");
  sub->add_option("--format", o.format, "auto, raw or aggregated")->capture_default_str();
  sub->add_option("--M", o.upper, "Upper end M of the support (default: largest time)");
  sub->add_option("--grid", o.grid, "N for i*M/N, i=1..N, or a comma-separated list")->capture_default_str();
  sub->add_option("--kernel", o.kernel, "triweight or epanechnikov")->capture_default_str();
  sub->add_option("--bandwidth", o.bandwidth,
                  "fixed:c[:exp] | affine:a:b[:exp] | piecewise:bp:a1:b1:a2:b2[:exp] (default fixed:M)");
  sub->add_option("--out", o.out, "Output file, - for stdout")->capture_default_str();
  sub->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

void add_interval_options(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  sub->add_option("--B", o.replicates, "Bootstrap replicates")->capture_default_str();
  sub->add_option("--sen-xu-bandwidth", o.sen_xu_bandwidth,
                  "Smoothing rule of the Sen-Xu resampling estimate (default --bandwidth)");
  sub->add_option("--critical-value", o.critical_value,
                  "Likelihood-ratio critical value (default: calibrated by simulation)");
  sub->add_option("--theta-step", o.theta_step, "Grid step of the LR inversion")->capture_default_str();
  sub->add_flag("--refine", o.refine, "Bisect LR interval end points");
  sub->add_option("--calibration-n", o.calibration_n, "Sample size of the LR calibration")
      ->capture_default_str();
  sub->add_option("--calibration-reps", o.calibration_reps, "Replicates of the LR calibration")
      ->capture_default_str();
}

// Flat key=value config file: each key is a long flag name; flags given on
// the command line win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
      break;
    }
    if (args[k].starts_with("--config=")) {
      path = args[k].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(file);
  } catch (const CLI::ParseError& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    const std::string flag = "--" + item.name;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
    if (given) continue;
    if (item.inputs.size() == 1 && item.inputs.front() == "true") {
      args.push_back(flag);
    } else if (item.inputs.size() == 1 && item.inputs.front() == "false") {
      continue;
    } else {
      // The INI reader splits comma lists such as grids; every option takes one string.
      std::string value;
      for (const std::string& part : item.inputs) value += (value.empty() ? "" : ",") + part;
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Current status data: MLE, smoothed MLE, confidence bands, bandwidth selection"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value file of flags; command-line flags take precedence");

  CLI::App* estimate = app.add_subcommand("estimate", "MLE and smoothed MLE on a grid");
  add_data_options(estimate, o);
  estimate->add_option("--mle-out", o.mle_out, "Also write the MLE knots and values here");

  CLI::App* ci = app.add_subcommand("ci", "Pointwise confidence band");
  add_data_options(ci, o);
  add_interval_options(ci, o);
  ci->add_option("--method", o.method, "smle-classical, smle-studentized, sen-xu or banerjee-wellner")
      ->capture_default_str();

  CLI::App* bandwidth = app.add_subcommand("bandwidth", "Bootstrap-MSE local bandwidths and affine fit");
  add_data_options(bandwidth, o);
  bandwidth->add_option("--points", o.points, "Time points, same syntax as --grid")->capture_default_str();
  bandwidth->add_option("--B", o.replicates, "Subsamples per time point")->capture_default_str();
  bandwidth->add_option("--m", o.subsample, "Subsample size")->capture_default_str();
  bandwidth->add_option("--c-step", o.c_step, "Candidate grid step")->capture_default_str();
  bandwidth->add_option("--c-max", o.c_max, "Largest candidate")->capture_default_str();
  bandwidth->add_option("--pilot", o.pilot, "Pilot bandwidth rule (default fixed:M)");
  bandwidth->add_option("--g", o.g_bandwidth, "Censoring-time smoothing (default M n^-1/5)");
  bandwidth->add_option("--under-exponent", o.under_exponent, "Exponent of the final bandwidth")
      ->capture_default_str();

  CLI::App* simulate = app.add_subcommand("simulate", "Coverage and length of a band in a simulation study");
  simulate->add_option("--model", o.model, "uniform or truncexp")->capture_default_str();
  simulate->add_option("--n", o.n, "Sample size")->capture_default_str();
  simulate->add_option("--sims", o.simulations, "Number of simulated samples")->capture_default_str();
  simulate->add_option("--method", o.method, "Band construction")->capture_default_str();
  simulate->add_option("--kernel", o.kernel, "triweight or epanechnikov")->capture_default_str();
  simulate->add_option("--bandwidth", o.bandwidth, "Bandwidth rule (default fixed:2)");
  simulate->add_option("--grid", o.grid, "Grid on [0, 2]")->capture_default_str();
  simulate->add_option("--out", o.out, "Output file, - for stdout")->capture_default_str();
  simulate->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  simulate->add_flag("--json", o.json, "Write JSON instead of CSV");
  simulate->add_flag("--timing", o.timing, "Report wall time on stderr");
  add_interval_options(simulate, o);

  CLI::App* compare = app.add_subcommand("compare", "All four bands on one grid");
  add_data_options(compare, o);
  add_interval_options(compare, o);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }

  try {
    if (estimate->parsed()) cmd_estimate(o);
    if (ci->parsed()) cmd_ci(o);
    if (bandwidth->parsed()) cmd_bandwidth(o);
    if (simulate->parsed()) cmd_simulate(o);
    if (compare->parsed()) cmd_compare(o);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return exit_data;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  return 0;
}

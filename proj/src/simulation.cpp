#include "curstat/simulation.hpp"

#include "curstat/errors.hpp"
#include "curstat/isotonic.hpp"
#include "curstat/parallel.hpp"
#include "curstat/smle.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace curstat {

namespace {

const double exp_norm = 1.0 - std::exp(-2.0);

// Independent stream families for the data and for each method's own draws.
constexpr std::uint64_t data_family = 0;
constexpr std::uint64_t method_family = 1;

}  // namespace

double ModelSpec::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= upper) return 1.0;
  return truth == Truth::uniform02 ? t / 2.0 : -std::expm1(-t) / exp_norm;
}

double ModelSpec::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  return truth == Truth::uniform02 ? 2.0 * u : -std::log1p(-u * exp_norm);
}

std::string_view to_string(Truth truth) {
  return truth == Truth::uniform02 ? "uniform" : "truncexp";
}

Truth parse_truth(std::string_view name) {
  if (name == "uniform") return Truth::uniform02;
  if (name == "truncexp") return Truth::trunc_exp02;
  throw InvalidInput("unknown model '" + std::string(name) + "' (expected uniform or truncexp)");
}

CurrentStatusSample draw_sample(const ModelSpec& model, std::int64_t n, RandomStream& rng) {
  if (n < 1) throw InvalidInput("sample size must be at least 1");
  std::vector<double> times(static_cast<std::size_t>(n));
  std::vector<int> indicators(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double event = model.quantile(rng.uniform());
    times[i] = rng.uniform(0.0, ModelSpec::upper);
    indicators[i] = event <= times[i] ? 1 : 0;
  }
  return CurrentStatusSample::from_observations(times, indicators, ModelSpec::upper);
}

void CoverageConfig::validate() const {
  if (n < 1) throw InvalidInput("sample size must be at least 1");
  if (simulations < 1) throw InvalidInput("need at least one simulation");
  if (grid.size() == 0) throw InvalidInput("evaluation grid is empty");
  if ((grid.array() < 0.0).any() || (grid.array() > ModelSpec::upper).any()) {
    throw InvalidInput("grid must lie in [0, M]");
  }
}

Eigen::VectorXd ExperimentResult::noncoverage() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(misses.size()));
  for (std::size_t i = 0; i < misses.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        static_cast<double>(misses[i]) / static_cast<double>(simulations);
  }
  return out;
}

ExperimentResult run_coverage(const CoverageConfig& config, const BandMethod& method) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index g = config.grid.size();
  const auto sims = static_cast<std::size_t>(config.simulations);
  Eigen::MatrixXd lengths(static_cast<Eigen::Index>(sims), g);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> missed(static_cast<Eigen::Index>(sims),
                                                                     g);
  const std::uint64_t data_seed = derive_seed(config.seed, data_family);
  const std::uint64_t method_seed = derive_seed(config.seed, method_family);
  parallel_for(sims, config.threads, [&](std::size_t s) {
    const auto row = static_cast<Eigen::Index>(s);
    RandomStream rng(data_seed, s);
    const CurrentStatusSample sample = draw_sample(config.model, config.n, rng);
    const ConfidenceBand band = method(sample, derive_seed(method_seed, s));
    if (band.size() != g) throw InvalidInput("band does not match the grid");
    for (Eigen::Index i = 0; i < g; ++i) {
      const double truth = config.model.cdf(config.grid(i));
      missed(row, i) = (truth < band.lower(i) || truth > band.upper(i)) ? 1 : 0;
      lengths(row, i) = band.upper(i) - band.lower(i);
    }
  });

  ExperimentResult out;
  out.model = std::string(to_string(config.model.truth));
  out.n = config.n;
  out.simulations = config.simulations;
  out.seed = config.seed;
  out.grid = config.grid;
  out.misses.assign(static_cast<std::size_t>(g), 0);
  out.mean_length = Eigen::VectorXd::Zero(g);
  for (Eigen::Index i = 0; i < g; ++i) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < lengths.rows(); ++s) {
      out.misses[static_cast<std::size_t>(i)] += missed(s, i);
      total += lengths(s, i);
    }
    out.mean_length(i) = total / static_cast<double>(sims);
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ConfidenceBand compute_band(const CurrentStatusSample& sample, const Eigen::VectorXd& grid,
                            const MethodSettings& settings, std::uint64_t seed) {
  if (settings.method == Method::banerjee_wellner) {
    return ci_banerjee_wellner(sample, grid, settings.lr);
  }
  BootstrapConfig bootstrap = settings.bootstrap;
  bootstrap.seed = seed;
  return run_bootstrap(
      SmoothBootstrap(sample, settings.kernel, settings.bandwidth, grid, settings.method),
      bootstrap);
}

ExperimentResult run_coverage(const CoverageConfig& config, MethodSettings settings) {
  config.validate();
  settings.bootstrap.validate();
  if (settings.method == Method::banerjee_wellner && !settings.lr.critical_value) {
    settings.lr.critical_value = calibrate_critical_value(settings.lr);
  }
  // Parallelism goes to the outer loop; results do not depend on the split.
  if (resolve_threads(config.threads) > 1) {
    settings.bootstrap.threads = 1;
    settings.lr.threads = 1;
  }
  ExperimentResult out = run_coverage(
      config, [&](const CurrentStatusSample& sample, std::uint64_t seed) {
        return compute_band(sample, config.grid, settings, seed);
      });
  out.method = std::string(to_string(settings.method));
  if (settings.method == Method::banerjee_wellner) {
    out.kernel = "none";
    out.bandwidth = "none";
    out.replicates = 0;
    out.alpha = settings.lr.alpha;
  } else {
    out.kernel = std::string(to_string(settings.kernel));
    out.bandwidth = settings.bandwidth.to_string();
    out.replicates = settings.bootstrap.replicates;
    out.alpha = settings.bootstrap.alpha;
  }
  return out;
}

double default_smooth_estimator(const CurrentStatusSample& sample, double t, double h,
                                Kernel kernel) {
  return smooth_jumps(jumps_of(fit_mle(sample)), kernel, t, h, sample.upper(), true);
}

Eigen::VectorXd monte_carlo_mse(const ModelSpec& model, std::int64_t n, double t,
                                const std::vector<double>& c_grid, int simulations,
                                std::uint64_t seed, const SmoothEstimator& estimator,
                                unsigned threads) {
  if (simulations < 1) throw InvalidInput("need at least one simulation");
  if (c_grid.empty()) throw InvalidInput("candidate grid is empty");
  const auto c = static_cast<Eigen::Index>(c_grid.size());
  Eigen::MatrixXd errors(simulations, c);
  const double truth = model.cdf(t);
  const double shrink = std::pow(static_cast<double>(n), -0.2);
  parallel_for(static_cast<std::size_t>(simulations), threads, [&](std::size_t s) {
    RandomStream rng(seed, s);
    const CurrentStatusSample sample = draw_sample(model, n, rng);
    for (Eigen::Index k = 0; k < c; ++k) {
      const double diff =
          estimator(sample, t, c_grid[static_cast<std::size_t>(k)] * shrink) - truth;
      errors(static_cast<Eigen::Index>(s), k) = diff * diff;
    }
  });
  return errors.colwise().mean().transpose();
}

std::vector<RateRow> rate_check(const ModelSpec& model, const std::vector<std::int64_t>& n_list,
                                double t, int simulations, std::uint64_t seed, Kernel kernel,
                                double c, unsigned threads) {
  if (simulations < 1) throw InvalidInput("need at least one simulation");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw InvalidInput("sample sizes must be increasing");
  }
  const double truth = model.cdf(t);
  std::vector<RateRow> out;
  for (std::int64_t n : n_list) {
    const double h = c * std::pow(static_cast<double>(n), -0.2);
    Eigen::MatrixXd errors(simulations, 2);
    const std::uint64_t family = derive_seed(seed, static_cast<std::uint64_t>(n));
    parallel_for(static_cast<std::size_t>(simulations), threads, [&](std::size_t s) {
      RandomStream rng(family, s);
      const CurrentStatusSample sample = draw_sample(model, n, rng);
      const StepFunction<double> mle = fit_mle(sample);
      const auto row = static_cast<Eigen::Index>(s);
      errors(row, 0) = mle(t) - truth;
      errors(row, 1) = smooth_jumps(jumps_of(mle), kernel, t, h, sample.upper(), true) - truth;
    });
    const double sims = static_cast<double>(simulations);
    out.push_back({n, std::sqrt(errors.col(0).squaredNorm() / sims),
                   std::sqrt(errors.col(1).squaredNorm() / sims)});
  }
  return out;
}

}  // namespace curstat

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taylorlaw/distributions.hpp"

namespace taylorlaw {

// Hill estimate from the k largest values relative to X_{(n-k)}:
// 1 / [(1/k) sum_{i=1..k} (log X_{(n-i+1)} - log X_{(n-k)})].
double hill(std::span<const double> data, std::size_t k);

// Hill estimates for every k in [1, n-1] sharing one sort. Entry k-1 holds
// the estimate for k, or nullopt when the mean log-excess is zero.
class HillTable {
 public:
  explicit HillTable(std::span<const double> data);
  // Builds from logs already in ascending order.
  static HillTable from_sorted_logs(std::vector<double> sorted_logs);

  std::size_t n() const noexcept { return logs_.size(); }
  std::optional<double> at(std::size_t k) const;

 private:
  HillTable() = default;
  void build_suffix();

  std::vector<double> logs_;
  std::vector<long double> top_sums_;  // top_sums_[k] = sum of the k largest logs
};

// k(theta) = ceil(n^theta), clamped to [1, n-1]. A relative slack of 1e-12
// keeps exact powers (100^0.5) from rounding up to the next integer.
std::size_t hill_k(std::size_t n, double theta);

struct HillCurve {
  std::size_t n = 0;
  std::vector<double> thetas;
  std::vector<std::size_t> ks;
  std::vector<std::optional<double>> estimates;  // nullopt: degenerate point
  std::vector<std::optional<double>> smoothed;
  std::vector<std::optional<double>> ci_low;  // empty when B = 0
  std::vector<std::optional<double>> ci_high;
  double level = 0.99;
  std::size_t bootstrap_replicates = 0;
};

struct HillCurveOptions {
  std::size_t bootstrap_replicates = 500;  // 0 disables the intervals
  double level = 0.99;
  std::uint64_t seed = 0;
};

// Alternative Hill plot over theta. The smoothed value at theta averages the
// Hill estimates at k, k+1, ..., min(2k - 1, n - 1) with k = k(theta).
HillCurve alt_hill_curve(std::span<const double> data, std::span<const double> thetas,
                         const HillCurveOptions& options = {});

enum class FitFamily { ParetoLS, GPD, NegBinomial };

std::string to_string(FitFamily family);

struct FitResult {
  FitFamily family = FitFamily::ParetoLS;
  // ParetoLS: x_min, alpha. GPD: threshold, shape, scale, exceedances.
  // NegBinomial: size, mean.
  std::map<std::string, double> params;
  std::optional<double> implied_tail_index;
  // Sum of squared residuals for ParetoLS, maximised log-likelihood otherwise.
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct SurvivalPoint {
  double value;
  double survival;
  double log_survival;
};

// One point per distinct value v with survival #{X_i > v} / n; the top value
// (survival 0) is left out.
std::vector<SurvivalPoint> empirical_survival(std::span<const double> data);

// OLS of log survival on log value over empirical_survival(data).
FitResult fit_pareto_ls(std::span<const double> data);

// GPD log-likelihood of excesses y >= 0; -inf outside the support.
double gpd_loglik(std::span<const double> excesses, double shape, double scale);

// Peaks over threshold: two-parameter GPD fitted by maximum likelihood to
// x - threshold for x > threshold. The likelihood is profiled over
// theta = shape / scale, searched on a grid in s = log(1 + theta * y_max)
// and refined by golden section. Shapes <= -1 are excluded (the likelihood
// is unbounded there).
FitResult fit_gpd_mle(std::span<const double> data, double threshold);

// Negative binomial (size r, mean m) by maximum likelihood: m is the sample
// mean, r solves the profile score by Newton steps on log r from the
// moment estimate m^2 / (v - m).
FitResult fit_negbinomial(std::span<const double> counts);

// Moment starting value m^2 / (v - m); DomainError unless v > m.
double negbinomial_moment_size(double mean, double variance);

struct BootstrapInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
  double level = 0.99;
  std::size_t replicates = 0;
  std::size_t failures = 0;  // resamples on which the statistic threw
};

// Nonparametric percentile bootstrap of statistic(data). Resample b uses
// stream (seed, bootstrap, b), so intervals do not depend on thread count.
BootstrapInterval bootstrap_ci(std::span<const double> data,
                               const std::function<double(std::span<const double>)>& statistic,
                               std::size_t replicates, double level, std::uint64_t seed);

// Linear-interpolation quantile (type 7) of sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace taylorlaw

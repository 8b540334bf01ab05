#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "taylorlaw/distributions.hpp"
#include "taylorlaw/moments.hpp"

namespace taylorlaw {

// count sizes equally spaced in log between n_min and n_max, rounded to the
// nearest integer. Endpoints are exact; duplicates after rounding are kept.
std::vector<std::size_t> log_spaced_sizes(std::size_t n_min, std::size_t n_max, std::size_t count);

struct TaylorPoint {
  std::size_t size = 0;
  double log_mean = 0.0;
  double log_variance = 0.0;
};

struct TaylorPoints {
  std::vector<TaylorPoint> points;
  std::size_t skipped = 0;  // subsamples with zero variance or nonpositive mean
  double log_base = 10.0;
};

// One uniform subsample without replacement per requested size, drawn by
// selection sampling from stream (seed, subsample, index of the size).
// size == n uses the full data. Sizes are processed in parallel.
TaylorPoints taylor_points(std::span<const double> data, std::span<const std::size_t> sizes,
                           std::uint64_t seed, double log_base = 10.0);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Simple linear regression y = intercept + slope x.
struct OlsFit {
  std::size_t count = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double residual_sd = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;

  // Two-sided Student-t interval with count - 2 degrees of freedom.
  Interval slope_ci(double level) const;
  Interval intercept_ci(double level) const;
};

// Needs at least 3 points and nonzero spread in x (DomainError otherwise).
OlsFit ols(std::span<const double> x, std::span<const double> y);

struct TaylorRegression {
  std::vector<TaylorPoint> points;
  std::size_t skipped = 0;
  double slope = 0.0;      // b
  double intercept = 0.0;  // log a, in log_base
  Interval slope_ci95, slope_ci99;
  Interval intercept_ci95, intercept_ci99;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::optional<double> implied_alpha;  // absent when b == 1
  double log_base = 10.0;
};

TaylorRegression ols_fit(const TaylorPoints& points);

struct DeviationSummary {
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t failures = 0;  // replicates whose ratio was undefined
  double limit = 0.0;
  double median = 0.0;  // of taylor_ratio - limit
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  double median_abs = 0.0;  // of |taylor_ratio - limit|
  std::vector<double> deviations;  // replicate order
};

// For each n: replicates sequences from spec (replicate id (index of n << 32)
// | r), deviation of taylor_ratio(limit.kind) from theoretical_limit(limit).
std::vector<DeviationSummary> convergence_diagnostic(const ProcessSpec& spec, const LimitSpec& limit,
                                                     std::span<const std::size_t> n_grid,
                                                     std::size_t replicates, std::uint64_t seed);

}  // namespace taylorlaw

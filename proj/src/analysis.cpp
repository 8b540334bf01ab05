#include "taylorlaw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "taylorlaw/error.hpp"
#include "taylorlaw/numerics.hpp"
#include "taylorlaw/parallel.hpp"
#include "taylorlaw/tailfit.hpp"

namespace taylorlaw {
namespace {

double t_quantile(double level, std::size_t df) {
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("confidence level must lie in (0, 1)");
  const boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

}  // namespace

std::vector<std::size_t> log_spaced_sizes(std::size_t n_min, std::size_t n_max, std::size_t count) {
  if (n_min < 1 || n_min > n_max) throw ParameterError("log-spaced sizes need 1 <= n_min <= n_max");
  if (count < 2) throw ParameterError("log-spaced sizes need count >= 2");
  const double a = std::log(static_cast<double>(n_min));
  const double b = std::log(static_cast<double>(n_max));
  std::vector<std::size_t> sizes(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    sizes[i] = static_cast<std::size_t>(std::llround(std::exp(u)));
    sizes[i] = std::clamp(sizes[i], n_min, n_max);
  }
  sizes.front() = n_min;
  sizes.back() = n_max;
  for (std::size_t i = 1; i < count; ++i) sizes[i] = std::max(sizes[i], sizes[i - 1]);
  return sizes;
}

TaylorPoints taylor_points(std::span<const double> data, std::span<const std::size_t> sizes,
                           std::uint64_t seed, double log_base) {
  if (!(log_base > 0.0) || log_base == 1.0 || !std::isfinite(log_base)) {
    throw ParameterError("log base must be positive and different from 1");
  }
  const std::size_t n = data.size();
  for (const std::size_t size : sizes) {
    if (size == 0 || size > n) {
      std::ostringstream msg;
      msg << "subsample size " << size << " is outside [1, " << n << "]";
      throw ParameterError(msg.str());
    }
  }
  const double log_b = std::log(log_base);
  std::vector<std::optional<TaylorPoint>> slots(sizes.size());
  parallel_for(sizes.size(), [&](std::size_t idx) {
    const std::size_t size = sizes[idx];
    std::vector<double> chosen;
    if (size == n) {
      chosen.assign(data.begin(), data.end());
    } else {
      // Knuth's selection sampling: keeps data order, exactly `size` picks.
      Rng rng(seed, StreamTag::kSubsample, idx);
      chosen.reserve(size);
      std::size_t needed = size;
      for (std::size_t i = 0; i < n && needed > 0; ++i) {
        const std::size_t remaining = n - i;
        if (rng.below(remaining) < needed) {
          chosen.push_back(data[i]);
          --needed;
        }
      }
    }
    CompensatedSum sum;
    for (const double x : chosen) sum += x;
    const double mean = sum.value() / static_cast<double>(size);
    CompensatedSum ss;
    for (const double x : chosen) ss += (x - mean) * (x - mean);
    const double variance = ss.value() / static_cast<double>(size);
    if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(variance)) return;
    slots[idx] = TaylorPoint{size, std::log(mean) / log_b, std::log(variance) / log_b};
  });
  TaylorPoints out;
  out.log_base = log_base;
  for (const auto& slot : slots) {
    if (slot) {
      out.points.push_back(*slot);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

Interval OlsFit::slope_ci(double level) const {
  const double q = t_quantile(level, count - 2);
  return {slope - q * slope_se, slope + q * slope_se};
}

Interval OlsFit::intercept_ci(double level) const {
  const double q = t_quantile(level, count - 2);
  return {intercept - q * intercept_se, intercept + q * intercept_se};
}

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("x and y must have the same length");
  const std::size_t m = x.size();
  if (m < 3) throw DomainError("regression intervals need at least 3 points (df = n - 2 > 0)");
  const double md = static_cast<double>(m);
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / md, my = sy.value() / md;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx.value() > 0.0)) throw DomainError("regression x values are collinear (zero variance)");
  OlsFit fit;
  fit.count = m;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum sse;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  const double df = md - 2.0;
  const double s2 = sse.value() / df;
  fit.residual_sd = std::sqrt(s2);
  fit.slope_se = std::sqrt(s2 / sxx.value());
  fit.intercept_se = std::sqrt(s2 * (1.0 / md + mx * mx / sxx.value()));
  fit.r2 = syy.value() > 0.0 ? 1.0 - sse.value() / syy.value() : 1.0;
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (md - 1.0) / df;
  return fit;
}

TaylorRegression ols_fit(const TaylorPoints& points) {
  std::vector<double> x, y;
  for (const auto& p : points.points) {
    x.push_back(p.log_mean);
    y.push_back(p.log_variance);
  }
  const OlsFit fit = ols(x, y);
  TaylorRegression out;
  out.points = points.points;
  out.skipped = points.skipped;
  out.log_base = points.log_base;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_ci95 = fit.slope_ci(0.95);
  out.slope_ci99 = fit.slope_ci(0.99);
  out.intercept_ci95 = fit.intercept_ci(0.95);
  out.intercept_ci99 = fit.intercept_ci(0.99);
  out.r2 = fit.r2;
  out.adj_r2 = fit.adj_r2;
  if (fit.slope != 1.0) out.implied_alpha = implied_alpha(fit.slope);
  return out;
}

std::vector<DeviationSummary> convergence_diagnostic(const ProcessSpec& spec, const LimitSpec& limit,
                                                     std::span<const std::size_t> n_grid,
                                                     std::size_t replicates, std::uint64_t seed) {
  if (replicates == 0) throw ParameterError("convergence diagnostic needs at least one replicate");
  if (n_grid.empty()) throw ParameterError("convergence diagnostic needs a nonempty n grid");
  spec.validate();
  const double target = theoretical_limit(limit);
  const MomentOrders orders = orders_for(limit.kind);
  std::vector<DeviationSummary> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::size_t n = n_grid[g];
    std::vector<double> deviation(replicates, std::numeric_limits<double>::quiet_NaN());
    parallel_for(replicates, [&](std::size_t r) {
      const std::uint64_t id = (static_cast<std::uint64_t>(g) << 32) | r;
      const SampleSet sample = sample_process(spec, n, seed, id);
      try {
        deviation[r] = taylor_ratio(summarize(sample.view(), orders), limit.kind) - target;
      } catch (const DomainError&) {
      } catch (const IllConditionedError&) {
      }
    });
    DeviationSummary summary;
    summary.n = n;
    summary.replicates = replicates;
    summary.limit = target;
    summary.deviations = deviation;
    std::vector<double> ok, abs_ok;
    for (const double d : deviation) {
      if (std::isfinite(d)) {
        ok.push_back(d);
        abs_ok.push_back(std::abs(d));
      }
    }
    summary.failures = replicates - ok.size();
    if (ok.empty()) {
      throw DegenerateError("every replicate produced an undefined Taylor ratio at n = " + std::to_string(n));
    }
    std::sort(ok.begin(), ok.end());
    std::sort(abs_ok.begin(), abs_ok.end());
    summary.median = quantile_sorted(ok, 0.5);
    summary.q25 = quantile_sorted(ok, 0.25);
    summary.q75 = quantile_sorted(ok, 0.75);
    summary.iqr = summary.q75 - summary.q25;
    summary.median_abs = quantile_sorted(abs_ok, 0.5);
    out.push_back(std::move(summary));
  }
  return out;
}

}  // namespace taylorlaw

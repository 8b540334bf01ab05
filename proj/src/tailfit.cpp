#include "taylorlaw/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "taylorlaw/error.hpp"
#include "taylorlaw/numerics.hpp"
#include "taylorlaw/parallel.hpp"
#include "taylorlaw/rng.hpp"

namespace taylorlaw {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> sorted_positive_logs(std::span<const double> data) {
  std::vector<double> logs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] > 0.0) || !std::isfinite(data[i])) {
      throw DomainError("tail estimation needs positive finite data");
    }
    logs[i] = std::log(data[i]);
  }
  std::sort(logs.begin(), logs.end());
  return logs;
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("confidence level must lie in (0, 1)");
}

struct GpdProfile {
  double loglik;
  double shape;
  double scale;
};

// Profile likelihood in theta = shape / scale.
GpdProfile gpd_profile(std::span<const double> y, double theta) {
  const double n = static_cast<double>(y.size());
  if (theta == 0.0) {
    CompensatedSum sum;
    for (const double v : y) sum += v;
    const double scale = sum.value() / n;
    return {-n * std::log(scale) - n, 0.0, scale};
  }
  CompensatedSum logs;
  for (const double v : y) {
    const double arg = theta * v;
    if (!(arg > -1.0)) return {kNegInf, 0.0, 0.0};
    logs += std::log1p(arg);
  }
  const double shape = logs.value() / n;
  const double scale = shape / theta;
  if (!(scale > 0.0) || !(shape > -1.0)) return {kNegInf, shape, scale};
  return {-n * std::log(scale) - n * (1.0 + shape), shape, scale};
}

double negbin_loglik(const std::vector<std::pair<double, double>>& groups, double n, double r, double m) {
  const double log_p = std::log(r / (r + m));
  const double log_q = std::log(m / (r + m));
  CompensatedSum total;
  const double lg_r = boost::math::lgamma(r);
  for (const auto& [x, count] : groups) {
    total += count * (boost::math::lgamma(x + r) - lg_r - boost::math::lgamma(x + 1.0) + x * log_q);
  }
  total += n * r * log_p;
  return total.value();
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

HillTable::HillTable(std::span<const double> data) : logs_(sorted_positive_logs(data)) {
  build_suffix();
}

HillTable HillTable::from_sorted_logs(std::vector<double> sorted_logs) {
  HillTable table;
  table.logs_ = std::move(sorted_logs);
  table.build_suffix();
  return table;
}

void HillTable::build_suffix() {
  const std::size_t n = logs_.size();
  top_sums_.assign(n + 1, 0.0L);
  for (std::size_t k = 1; k <= n; ++k) top_sums_[k] = top_sums_[k - 1] + logs_[n - k];
}

std::optional<double> HillTable::at(std::size_t k) const {
  const std::size_t n = logs_.size();
  if (k < 1 || k + 1 > n) {
    std::ostringstream msg;
    msg << "Hill needs 1 <= k <= n - 1, got k = " << k << " with n = " << n;
    throw ParameterError(msg.str());
  }
  const long double excess =
      top_sums_[k] / static_cast<long double>(k) - static_cast<long double>(logs_[n - k - 1]);
  if (!(excess > 0.0L)) return std::nullopt;
  return static_cast<double>(1.0L / excess);
}

double hill(std::span<const double> data, std::size_t k) {
  if (k < 1 || k + 1 > data.size()) {
    std::ostringstream msg;
    msg << "Hill needs 1 <= k <= n - 1, got k = " << k << " with n = " << data.size();
    throw ParameterError(msg.str());
  }
  const auto estimate = HillTable(data).at(k);
  if (!estimate) throw DegenerateError("Hill estimate undefined: the top order statistics are all equal");
  return *estimate;
}

std::size_t hill_k(std::size_t n, double theta) {
  if (n < 2) throw DomainError("a Hill curve needs at least 2 observations");
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0, 1]");
  const double raw = std::ceil(std::pow(static_cast<double>(n), theta) * (1.0 - 1e-12));
  const auto k = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(k, n - 1);
}

HillCurve alt_hill_curve(std::span<const double> data, std::span<const double> thetas,
                         const HillCurveOptions& options) {
  check_level(options.level);
  if (thetas.empty()) throw ParameterError("theta grid is empty");
  if (!std::is_sorted(thetas.begin(), thetas.end())) throw ParameterError("theta grid must be ascending");
  const HillTable table(data);
  const std::size_t n = table.n();

  HillCurve curve;
  curve.n = n;
  curve.level = options.level;
  curve.thetas.assign(thetas.begin(), thetas.end());
  for (const double theta : thetas) {
    const std::size_t k = hill_k(n, theta);
    curve.ks.push_back(k);
    curve.estimates.push_back(table.at(k));
    const std::size_t last = std::min(2 * k - 1, n - 1);
    CompensatedSum sum;
    std::size_t used = 0;
    for (std::size_t j = k; j <= last; ++j) {
      if (const auto v = table.at(j)) {
        sum += *v;
        ++used;
      }
    }
    curve.smoothed.push_back(used ? std::optional<double>(sum.value() / static_cast<double>(used))
                                  : std::nullopt);
  }

  const std::size_t B = options.bootstrap_replicates;
  if (B == 0) return curve;
  curve.bootstrap_replicates = B;
  std::vector<double> sorted_logs = sorted_positive_logs(data);
  // estimates[b * T + t]; NaN marks a degenerate resample.
  const std::size_t T = thetas.size();
  std::vector<double> boot(B * T);
  parallel_for(B, [&](std::size_t b) {
    Rng rng(options.seed, StreamTag::kBootstrap, b);
    // Multiplicities of each sorted position; expanding them in order yields
    // the sorted resample without another sort.
    std::vector<std::uint32_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
    std::vector<double> resample;
    resample.reserve(n);
    for (std::size_t i = 0; i < n; ++i) resample.insert(resample.end(), counts[i], sorted_logs[i]);
    const auto boot_table = HillTable::from_sorted_logs(std::move(resample));
    for (std::size_t t = 0; t < T; ++t) {
      const auto v = boot_table.at(curve.ks[t]);
      boot[b * T + t] = v ? *v : std::numeric_limits<double>::quiet_NaN();
    }
  });
  const double tail = (1.0 - options.level) / 2.0;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> column;
    column.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
      if (!std::isnan(boot[b * T + t])) column.push_back(boot[b * T + t]);
    }
    if (column.empty()) {
      curve.ci_low.push_back(std::nullopt);
      curve.ci_high.push_back(std::nullopt);
      continue;
    }
    std::sort(column.begin(), column.end());
    curve.ci_low.push_back(quantile_sorted(column, tail));
    curve.ci_high.push_back(quantile_sorted(column, 1.0 - tail));
  }
  return curve;
}

std::string to_string(FitFamily family) {
  switch (family) {
    case FitFamily::ParetoLS:
      return "pareto_ls";
    case FitFamily::GPD:
      return "gpd";
    case FitFamily::NegBinomial:
      return "negbinomial";
  }
  return "unknown";
}

std::vector<SurvivalPoint> empirical_survival(std::span<const double> data) {
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<SurvivalPoint> points;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    const double above = static_cast<double>(sorted.size() - i - 1);
    if (above == 0.0) break;
    const double s = above / n;
    points.push_back({sorted[i], s, std::log(s)});
  }
  return points;
}

FitResult fit_pareto_ls(std::span<const double> data) {
  for (const double x : data) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Pareto fit needs positive finite data");
  }
  const auto points = empirical_survival(data);
  if (points.size() < 2) throw DomainError("Pareto fit needs at least 3 distinct values");
  const double m = static_cast<double>(points.size());
  CompensatedSum sx, sy;
  for (const auto& p : points) {
    sx += std::log(p.value);
    sy += p.log_survival;
  }
  const double mx = sx.value() / m, my = sy.value() / m;
  CompensatedSum sxx, sxy;
  for (const auto& p : points) {
    const double dx = std::log(p.value) - mx;
    sxx += dx * dx;
    sxy += dx * (p.log_survival - my);
  }
  const double slope = sxy.value() / sxx.value();
  const double intercept = my - slope * mx;
  CompensatedSum sse;
  for (const auto& p : points) {
    const double r = p.log_survival - (intercept + slope * std::log(p.value));
    sse += r * r;
  }
  const double alpha = -slope;
  FitResult out;
  out.family = FitFamily::ParetoLS;
  out.params["alpha"] = alpha;
  out.params["x_min"] = alpha != 0.0 ? std::exp(intercept / alpha) : std::numeric_limits<double>::quiet_NaN();
  out.params["points"] = m;
  out.implied_tail_index = alpha;
  out.objective = sse.value();
  return out;
}

double gpd_loglik(std::span<const double> y, double shape, double scale) {
  if (!(scale > 0.0)) return kNegInf;
  const double n = static_cast<double>(y.size());
  CompensatedSum total;
  if (shape == 0.0) {
    for (const double v : y) {
      if (v < 0.0) return kNegInf;
      total += v;
    }
    return -n * std::log(scale) - total.value() / scale;
  }
  for (const double v : y) {
    const double arg = shape * v / scale;
    if (v < 0.0 || !(arg > -1.0)) return kNegInf;
    total += std::log1p(arg);
  }
  return -n * std::log(scale) - (1.0 + 1.0 / shape) * total.value();
}

FitResult fit_gpd_mle(std::span<const double> data, double threshold) {
  constexpr std::size_t kMinExceedances = 30;
  constexpr int kGridHalfWidth = 300;
  constexpr double kGridStep = 0.1;
  constexpr int kMaxGoldenIterations = 200;

  std::vector<double> y;
  for (const double x : data) {
    if (!std::isfinite(x)) throw DomainError("GPD fit needs finite data");
    if (x > threshold) y.push_back(x - threshold);
  }
  if (y.size() < kMinExceedances) {
    std::ostringstream msg;
    msg << "GPD fit needs at least " << kMinExceedances << " exceedances, threshold " << threshold
        << " leaves " << y.size();
    throw DomainError(msg.str());
  }
  const double y_max = *std::max_element(y.begin(), y.end());
  auto theta_of = [&](double s) { return std::expm1(s) / y_max; };
  auto profile = [&](double s) { return gpd_profile(y, theta_of(s)); };

  int best = -kGridHalfWidth;
  double best_ll = kNegInf;
  for (int i = -kGridHalfWidth; i <= kGridHalfWidth; ++i) {
    const double ll = profile(i * kGridStep).loglik;
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (!std::isfinite(best_ll) || best == -kGridHalfWidth || best == kGridHalfWidth) {
    std::ostringstream msg;
    msg << "GPD profile likelihood has no interior maximum on the search grid (best s = "
        << best * kGridStep << ", loglik = " << best_ll << ", exceedances = " << y.size() << ")";
    throw ConvergenceError(msg.str());
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = (best - 1) * kGridStep, b = (best + 1) * kGridStep;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = profile(c).loglik, fd = profile(d).loglik;
  int iterations = 0;
  while (b - a > 1e-12 && iterations < kMaxGoldenIterations) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = profile(c).loglik;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = profile(d).loglik;
    }
    ++iterations;
  }
  if (b - a > 1e-6) {
    std::ostringstream msg;
    msg << "GPD golden-section search did not converge: bracket [" << a << ", " << b << "] after "
        << iterations << " iterations";
    throw ConvergenceError(msg.str());
  }
  auto opt = profile(0.5 * (a + b));
  if (opt.loglik < best_ll) opt = profile(best * kGridStep);

  FitResult out;
  out.family = FitFamily::GPD;
  out.params["threshold"] = threshold;
  out.params["shape"] = opt.shape;
  out.params["scale"] = opt.scale;
  out.params["exceedances"] = static_cast<double>(y.size());
  if (opt.shape > 0.0) out.implied_tail_index = 1.0 / opt.shape;
  out.objective = gpd_loglik(y, opt.shape, opt.scale);
  out.iterations = static_cast<std::size_t>(iterations);
  return out;
}

double negbinomial_moment_size(double mean, double variance) {
  if (!(variance > mean)) {
    std::ostringstream msg;
    msg << "negative binomial needs over-dispersion (variance " << variance << " <= mean " << mean << ")";
    throw DomainError(msg.str());
  }
  return mean * mean / (variance - mean);
}

FitResult fit_negbinomial(std::span<const double> counts) {
  constexpr int kMaxIterations = 500;
  constexpr double kMaxLogSize = 35.0;  // r ~ 1.6e15: indistinguishable from Poisson

  if (counts.size() < 2) throw DomainError("negative binomial fit needs at least 2 observations");
  std::map<double, double> grouped;
  for (const double x : counts) {
    if (!(x >= 0.0) || x != std::floor(x) || !std::isfinite(x)) {
      throw DomainError("negative binomial fit needs nonnegative integer data");
    }
    grouped[x] += 1.0;
  }
  const double n = static_cast<double>(counts.size());
  CompensatedSum s1;
  for (const auto& [x, c] : grouped) s1 += x * c;
  const double m = s1.value() / n;
  CompensatedSum s2;
  for (const auto& [x, c] : grouped) s2 += c * (x - m) * (x - m);
  const double v = s2.value() / n;
  const double r0 = negbinomial_moment_size(m, v);
  const std::vector<std::pair<double, double>> groups(grouped.begin(), grouped.end());

  // Score and its derivative in r at fixed mean m.
  auto score = [&](double r) {
    CompensatedSum s;
    const double psi_r = boost::math::digamma(r);
    for (const auto& [x, c] : groups) s += c * (boost::math::digamma(x + r) - psi_r);
    s += n * std::log(r / (r + m));
    return s.value();
  };
  auto score_slope = [&](double r) {
    CompensatedSum s;
    const double tri_r = boost::math::trigamma(r);
    for (const auto& [x, c] : groups) s += c * (boost::math::trigamma(x + r) - tri_r);
    s += n * m / (r * (r + m));
    return s.value();
  };

  double u = std::log(r0);
  double ll = negbin_loglik(groups, n, std::exp(u), m);
  int iteration = 0;
  bool converged = false;
  for (; iteration < kMaxIterations; ++iteration) {
    const double r = std::exp(u);
    const double g = r * score(r);
    const double h = g + r * r * score_slope(r);
    double step = h < 0.0 ? -g / h : (g > 0.0 ? 1.0 : -1.0);
    step = std::clamp(step, -5.0, 5.0);
    double next_u = u + step, next_ll = kNegInf;
    for (int halving = 0; halving < 60; ++halving) {
      next_u = std::min(u + step, kMaxLogSize);
      next_ll = negbin_loglik(groups, n, std::exp(next_u), m);
      if (next_ll >= ll - 1e-12 * std::abs(ll)) break;
      step /= 2.0;
    }
    const double moved = std::abs(next_u - u);
    u = next_u;
    ll = next_ll;
    if (moved < 1e-10 || u >= kMaxLogSize) {
      converged = true;
      ++iteration;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "negative binomial Newton iteration did not converge in " << kMaxIterations
        << " steps (log r = " << u << ")";
    throw ConvergenceError(msg.str());
  }
  FitResult out;
  out.family = FitFamily::NegBinomial;
  out.params["size"] = std::exp(u);
  out.params["mean"] = m;
  out.params["moment_size"] = r0;
  out.objective = ll;
  out.iterations = static_cast<std::size_t>(iteration);
  return out;
}

BootstrapInterval bootstrap_ci(std::span<const double> data,
                               const std::function<double(std::span<const double>)>& statistic,
                               std::size_t replicates, double level, std::uint64_t seed) {
  check_level(level);
  if (data.empty()) throw DomainError("cannot bootstrap an empty sample");
  if (replicates < 2) throw ParameterError("bootstrap needs at least 2 replicates");
  BootstrapInterval out;
  out.estimate = statistic(data);
  out.level = level;
  out.replicates = replicates;
  const std::size_t n = data.size();
  std::vector<double> values(replicates, std::numeric_limits<double>::quiet_NaN());
  parallel_for(replicates, [&](std::size_t b) {
    Rng rng(seed, StreamTag::kBootstrap, b);
    std::vector<double> resample(n);
    for (auto& x : resample) x = data[rng.below(n)];
    try {
      values[b] = statistic(resample);
    } catch (const Error&) {
    }
  });
  std::vector<double> ok;
  for (const double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
  }
  out.failures = replicates - ok.size();
  if (ok.size() < 2) throw DegenerateError("bootstrap statistic failed on nearly every resample");
  std::sort(ok.begin(), ok.end());
  const double tail = (1.0 - level) / 2.0;
  out.low = quantile_sorted(ok, tail);
  out.high = quantile_sorted(ok, 1.0 - tail);
  return out;
}

}  // namespace taylorlaw

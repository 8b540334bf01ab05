#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "taylorlaw/distributions.hpp"
#include "taylorlaw/error.hpp"
#include "taylorlaw/tailfit.hpp"

using namespace taylorlaw;
using Catch::Approx;

namespace {

// Direct transcription of the Hill formula, sorting every time.
double naive_hill(std::vector<double> x, std::size_t k) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  long double s = 0.0L;
  for (std::size_t i = 1; i <= k; ++i) s += std::log(static_cast<long double>(x[n - i])) - std::log(static_cast<long double>(x[n - k - 1]));
  return static_cast<double>(static_cast<long double>(k) / s);
}

std::vector<double> gpd_sample(double threshold, double shape, double scale, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = threshold + scale / shape * (std::pow(rng.uniform_open(), -shape) - 1.0);
  return out;
}

}  // namespace

TEST_CASE("Hill hand example") {
  const std::vector<double> x{std::exp(0.0), std::exp(1.0), std::exp(2.0), std::exp(3.0)};
  CHECK(hill(x, 3) == Approx(0.5).epsilon(1e-12));
  CHECK(hill(x, 1) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(hill(x, 0), ParameterError);
  CHECK_THROWS_AS(hill(x, 4), ParameterError);
  const std::vector<double> flat{1.0, 5.0, 5.0, 5.0};
  CHECK_THROWS_AS(hill(flat, 2), DegenerateError);
  const std::vector<double> negative{-1.0, 2.0, 3.0};
  CHECK_THROWS_AS(hill(negative, 1), DomainError);
}

TEST_CASE("HillTable agrees with the direct formula") {
  const auto x = sample_pareto(1.0, 0.7, 500, 3).values;
  const HillTable table(x);
  for (const std::size_t k : {1, 2, 17, 250, 499}) CHECK(*table.at(k) == Approx(naive_hill(x, k)).epsilon(1e-12));
  CHECK_THROWS_AS(table.at(0), ParameterError);
  CHECK_THROWS_AS(table.at(500), ParameterError);
}

TEST_CASE("k(theta) rounding and clamping") {
  CHECK(hill_k(100, 0.5) == 10);
  CHECK(hill_k(100'000, 0.8) == 10'000);
  CHECK(hill_k(10, 1.0) == 9);
  CHECK(hill_k(10, 0.01) == 2);
  CHECK_THROWS_AS(hill_k(10, 0.0), ParameterError);
}

TEST_CASE("alternative Hill curve smoothing and bootstrap") {
  const auto x = sample_pareto(1.0, 0.5, 5000, 11).values;
  const std::vector<double> thetas{0.5, 0.7, 0.9};
  HillCurveOptions options;
  options.bootstrap_replicates = 100;
  options.seed = 4;
  const auto curve = alt_hill_curve(x, thetas, options);
  const HillTable table(x);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const std::size_t k = curve.ks[i];
    CHECK(k == hill_k(5000, thetas[i]));
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = k; j <= std::min(2 * k - 1, std::size_t{4999}); ++j, ++count) sum += *table.at(j);
    CHECK(*curve.smoothed[i] == Approx(sum / count).epsilon(1e-12));
    CHECK(*curve.ci_low[i] <= *curve.estimates[i]);
    CHECK(*curve.ci_high[i] >= *curve.estimates[i]);
  }
  const auto again = alt_hill_curve(x, thetas, options);
  CHECK(again.ci_low == curve.ci_low);
  CHECK(again.ci_high == curve.ci_high);

  options.bootstrap_replicates = 0;
  CHECK(alt_hill_curve(x, thetas, options).ci_low.empty());
  const std::vector<double> unsorted{0.9, 0.5};
  CHECK_THROWS_AS(alt_hill_curve(x, unsorted, options), ParameterError);
}

TEST_CASE("empirical survival and Pareto least squares") {
  const std::vector<double> x{1.0, 1.0, 2.0, 3.0};
  const auto points = empirical_survival(x);
  REQUIRE(points.size() == 2);
  CHECK(points[0].value == 1.0);
  CHECK(points[0].survival == 0.5);
  CHECK(points[1].survival == 0.25);

  // Values placed so that log survival is exactly -alpha log x.
  const double alpha = 0.6;
  const std::size_t n = 400;
  std::vector<double> exact;
  for (std::size_t j = 1; j < n; ++j) exact.push_back(std::pow(static_cast<double>(n - j) / n, -1.0 / alpha));
  exact.push_back(exact.back() * 2.0);
  const auto fit = fit_pareto_ls(exact);
  CHECK(fit.family == FitFamily::ParetoLS);
  CHECK(fit.params.at("alpha") == Approx(alpha).epsilon(1e-10));
  CHECK(*fit.implied_tail_index == Approx(alpha).epsilon(1e-10));
  CHECK(fit.objective == Approx(0.0).margin(1e-18));
}

TEST_CASE("GPD log-likelihood hand value") {
  const std::vector<double> y{1.0};
  CHECK(gpd_loglik(y, 1.0, 1.0) == Approx(-2.0 * std::log(2.0)));
  CHECK(gpd_loglik(y, 0.0, 2.0) == Approx(-std::log(2.0) - 0.5));
  CHECK(gpd_loglik(y, -0.5, 0.25) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("GPD fit recovers simulated parameters and is a grid maximum") {
  const auto x = gpd_sample(5.0, 0.5, 2.0, 20'000, 21);
  const auto fit = fit_gpd_mle(x, 5.0);
  const double shape = fit.params.at("shape"), scale = fit.params.at("scale");
  CHECK(shape == Approx(0.5).margin(0.05));
  CHECK(scale == Approx(2.0).margin(0.1));
  CHECK(*fit.implied_tail_index == Approx(1.0 / shape));
  CHECK(fit.params.at("exceedances") == 20'000);

  std::vector<double> excess;
  for (const double v : x) excess.push_back(v - 5.0);
  const double best = gpd_loglik(excess, shape, scale);
  CHECK(fit.objective == Approx(best).epsilon(1e-12));
  for (int i = -25; i < 25; ++i) {
    for (int j = -25; j < 25; ++j) {
      const double s = shape + 0.004 * i, c = scale * (1.0 + 0.004 * j);
      REQUIRE(gpd_loglik(excess, s, c) <= best + 1e-6);
    }
  }
}

TEST_CASE("GPD fit needs enough exceedances") {
  const auto x = gpd_sample(0.0, 0.5, 1.0, 1000, 2);
  CHECK_THROWS_AS(fit_gpd_mle(x, 1e9), DomainError);
}

TEST_CASE("negative binomial moment start and fit") {
  CHECK(negbinomial_moment_size(34.0, 160'858.0) == Approx(34.0 * 34.0 / 160'824.0));
  CHECK_THROWS_AS(negbinomial_moment_size(5.0, 4.0), DomainError);

  std::mt19937_64 gen(7);
  std::gamma_distribution<double> gamma(2.0, 2.5);  // mean 5, size 2
  std::vector<double> counts(20'000);
  for (auto& c : counts) c = static_cast<double>(std::poisson_distribution<long>(gamma(gen))(gen));
  const auto fit = fit_negbinomial(counts);
  double mean = 0.0;
  for (const double c : counts) mean += c;
  mean /= counts.size();
  CHECK(fit.params.at("mean") == Approx(mean));
  CHECK(fit.params.at("size") == Approx(2.0).margin(0.15));
  const std::vector<double> bad{1.0, 2.5};
  CHECK_THROWS_AS(fit_negbinomial(bad), DomainError);
}

TEST_CASE("percentile bootstrap and type-7 quantiles") {
  const std::vector<double> sorted{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(sorted, 0.5) == Approx(2.5));
  CHECK(quantile_sorted(sorted, 0.25) == Approx(1.75));
  CHECK(quantile_sorted(sorted, 1.0) == 4.0);

  const auto x = sample_pareto(1.0, 3.0, 2000, 5).values;
  const auto mean = [](std::span<const double> v) {
    double s = 0.0;
    for (const double e : v) s += e;
    return s / static_cast<double>(v.size());
  };
  const auto ci = bootstrap_ci(x, mean, 400, 0.95, 9);
  CHECK(ci.low < ci.estimate);
  CHECK(ci.high > ci.estimate);
  CHECK(ci.failures == 0);
  CHECK(bootstrap_ci(x, mean, 400, 0.95, 9).low == ci.low);
  const auto always_fails = [](std::span<const double>) -> double { throw DegenerateError("no"); };
  CHECK_THROWS_AS(bootstrap_ci(x, always_fails, 50, 0.95, 9), DegenerateError);
}

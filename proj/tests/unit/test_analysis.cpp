#include <catch_amalgamated.hpp>

#include <cmath>

#include "taylorlaw/analysis.hpp"
#include "taylorlaw/error.hpp"
#include "taylorlaw/parallel.hpp"

using namespace taylorlaw;
using Catch::Approx;

TEST_CASE("log-spaced sizes") {
  CHECK(log_spaced_sizes(1, 100, 3) == std::vector<std::size_t>{1, 10, 100});
  const auto s = log_spaced_sizes(500, 147'602, 100);
  CHECK(s.size() == 100);
  CHECK(s.front() == 500);
  CHECK(s.back() == 147'602);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK_THROWS_AS(log_spaced_sizes(0, 10, 5), ParameterError);
  CHECK_THROWS_AS(log_spaced_sizes(10, 5, 5), ParameterError);
  CHECK_THROWS_AS(log_spaced_sizes(1, 10, 1), ParameterError);
}

TEST_CASE("OLS hand examples") {
  const std::vector<double> x0{0, 1, 2}, y0{1, 3, 5};
  const auto exact = ols(x0, y0);
  CHECK(exact.slope == Approx(2.0));
  CHECK(exact.intercept == Approx(1.0));
  CHECK(exact.r2 == Approx(1.0));

  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  const auto fit = ols(x, y);
  CHECK(fit.slope == Approx(0.6));
  CHECK(fit.intercept == Approx(2.2));
  CHECK(fit.slope_se == Approx(std::sqrt(0.08)));
  CHECK(fit.intercept_se == Approx(std::sqrt(0.8 * (0.2 + 9.0 / 10.0))));
  CHECK(fit.r2 == Approx(0.6));
  CHECK(fit.adj_r2 == Approx(1.0 - 0.4 * 4.0 / 3.0));
  const auto ci = fit.slope_ci(0.95);
  // t quantile 0.975 with 3 degrees of freedom is 3.182446305...
  CHECK(ci.high - 0.6 == Approx(3.182446305284263 * std::sqrt(0.08)).epsilon(1e-9));
  CHECK(0.6 - ci.low == Approx(ci.high - 0.6));

  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(ols(two, two), DomainError);
  const std::vector<double> same{3, 3, 3};
  CHECK_THROWS_AS(ols(same, y0), DomainError);
}

TEST_CASE("Taylor points use the full sample at size n") {
  const auto data = sample_pareto(1.0, 0.5, 5000, 3).values;
  const std::vector<std::size_t> sizes{50, 5000};
  const auto pts = taylor_points(data, sizes, 8);
  REQUIRE(pts.points.size() == 2);
  double mean = 0.0;
  for (const double v : data) mean += v;
  mean /= data.size();
  CHECK(pts.points[1].log_mean == Approx(std::log10(mean)));
  const auto e = taylor_points(data, sizes, 8, std::exp(1.0));
  CHECK(e.points[1].log_mean == Approx(std::log(mean)));
  const std::vector<std::size_t> too_big{6000};
  CHECK_THROWS_AS(taylor_points(data, too_big, 8), ParameterError);
}

TEST_CASE("Taylor points skip zero-variance subsamples") {
  const std::vector<double> data(100, 2.0);
  const std::vector<std::size_t> sizes{10, 20, 100};
  const auto pts = taylor_points(data, sizes, 1);
  CHECK(pts.points.empty());
  CHECK(pts.skipped == 3);
}

TEST_CASE("Taylor regression on Pareto data has a slope near the limit") {
  const auto data = sample_pareto(1.0, 0.5, 200'000, 17).values;
  const auto sizes = log_spaced_sizes(500, data.size(), 60);
  const auto reg = ols_fit(taylor_points(data, sizes, 2));
  CHECK(reg.points.size() == 60);
  CHECK(reg.slope > 2.0);
  CHECK(reg.slope < 4.0);
  CHECK(reg.slope_ci99.low <= reg.slope_ci95.low);
  CHECK(reg.slope_ci99.high >= reg.slope_ci95.high);
  REQUIRE(reg.implied_alpha.has_value());
  CHECK(*reg.implied_alpha == Approx((2.0 - reg.slope) / (1.0 - reg.slope)));
}

TEST_CASE("convergence diagnostic is reproducible and thread-invariant") {
  const ProcessSpec spec{process::Iid{TailModel::pareto(1.0, 0.5)}};
  const std::vector<std::size_t> grid{1000, 10000};
  set_thread_count(1);
  const auto a = convergence_diagnostic(spec, {limit::Variance{}, 0.5}, grid, 12, 4);
  set_thread_count(4);
  const auto b = convergence_diagnostic(spec, {limit::Variance{}, 0.5}, grid, 12, 4);
  set_thread_count(0);
  REQUIRE(a.size() == 2);
  CHECK(a[1].deviations == b[1].deviations);
  CHECK(a[0].limit == Approx(3.0));
  CHECK(a[0].iqr == Approx(a[0].q75 - a[0].q25));
  CHECK(a[0].failures == 0);
  CHECK_THROWS_AS(convergence_diagnostic(spec, {limit::Variance{}, 0.5}, grid, 0, 4), ParameterError);
  CHECK_THROWS_AS(convergence_diagnostic(spec, {limit::Variance{}, 1.5}, grid, 2, 4), RegimeError);
}

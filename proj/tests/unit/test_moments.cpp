#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "taylorlaw/error.hpp"
#include "taylorlaw/moments.hpp"

using namespace taylorlaw;
using Catch::Approx;

TEST_CASE("summary of {1, 2, 3}") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto s = summarize(x);
  CHECK(s.n == 3);
  CHECK(s.mean == Approx(2.0));
  CHECK(s.m_raw.at(2.0) == Approx(14.0 / 3.0));
  CHECK(s.m_raw.at(3.0) == Approx(12.0));
  CHECK(s.variance == Approx(2.0 / 3.0));
  CHECK(s.m_central.at(3) == Approx(0.0).margin(1e-15));
  CHECK(s.count_lower == 2);
  CHECK(s.count_upper == 1);
  CHECK(s.m_lower.at(2.0) == Approx(1.0 / 3.0));
  CHECK(s.m_upper.at(2.0) == Approx(1.0 / 3.0));
  CHECK(*s.m_lower_local.at(2.0) == Approx(0.5));
  CHECK(*s.m_upper_local.at(2.0) == Approx(1.0));
}

TEST_CASE("central moments are signed") {
  const std::vector<double> x{1.0, 1.0, 1.0, 5.0};
  const auto s = summarize(x);
  // mean 2; deviations -1, -1, -1, 3
  CHECK(s.m_central.at(3) == Approx((-3.0 + 27.0) / 4.0));
  const std::vector<double> y{5.0, 5.0, 5.0, 1.0};
  CHECK(summarize(y).m_central.at(3) == Approx(-6.0));
}

TEST_CASE("constant data: no upper side, local upper absent") {
  const std::vector<double> x(10, 4.0);
  const auto s = summarize(x);
  CHECK(s.count_upper == 0);
  CHECK(s.count_lower == 10);
  CHECK_FALSE(s.m_upper_local.at(2.0).has_value());
  CHECK(s.variance == 0.0);
  CHECK_THROWS_AS(taylor_ratio(s, limit::Variance{}), DomainError);
  CHECK_THROWS_AS(taylor_ratio(s, limit::LocalUpperVsMean{2.0}), DomainError);
}

TEST_CASE("summarize rejects empty input") { CHECK_THROWS_AS(summarize(std::vector<double>{}), DomainError); }

TEST_CASE("taylor_ratio is the log ratio of the named statistics") {
  const std::vector<double> x{1.0, 2.0, 10.0, 50.0};
  const auto s = summarize(x, orders_for(limit::MomentRatio{3.0, 1.0}));
  CHECK(taylor_ratio(s, limit::MomentRatio{3.0, 1.0}) == Approx(std::log(s.m_raw.at(3.0)) / std::log(s.mean)));
  const auto v = summarize(x);
  CHECK(taylor_ratio(v, limit::Variance{}) == Approx(std::log(v.variance) / std::log(v.mean)));
  CHECK_THROWS_AS(taylor_ratio(v, limit::MomentRatio{7.0, 1.0}), ParameterError);
  // mean exactly 1: log denominator vanishes
  const std::vector<double> one{0.5, 1.5};
  CHECK_THROWS_AS(taylor_ratio(summarize(one), limit::Variance{}), IllConditionedError);
}

TEST_CASE("theoretical limits and regimes") {
  CHECK(iota(3.0, 1.0, 0.5) == Approx(5.0));
  CHECK(iota_plus(2.0, 0.5) == Approx(3.5));
  CHECK(theoretical_limit({limit::Variance{}, 0.5}) == Approx(3.0));
  CHECK(theoretical_limit({limit::MomentRatio{3.0, 1.0}, 0.5}) == Approx(5.0));
  CHECK(theoretical_limit({limit::CentralVsMean{3}, 0.5}) == Approx(5.0));
  CHECK(theoretical_limit({limit::CentralVsCentral{3, 2}, 0.5}) == Approx(2.5 / 1.5));
  CHECK(theoretical_limit({limit::UpperCentralVsMean{2.0}, 0.5}) == Approx(3.0));
  CHECK(theoretical_limit({limit::LocalUpperVsMean{2.0}, 0.5}) == Approx(3.5));
  CHECK(theoretical_limit({limit::LowerVsMean{2.0}, 0.5}) == Approx(2.0));
  CHECK(theoretical_limit({limit::MomentRatio{3.0, 2.0}, 1.5}) == Approx(1.5 / 0.5));
  CHECK_THROWS_AS(theoretical_limit({limit::Variance{}, 1.2}), RegimeError);
  CHECK_THROWS_AS(theoretical_limit({limit::MomentRatio{1.0, 2.0}, 1.5}), RegimeError);
  CHECK_THROWS_AS(theoretical_limit({limit::UpperCentralVsMean{0.5}, 0.5}), RegimeError);
}

TEST_CASE("implied alpha inverts the variance limit") {
  CHECK(implied_alpha(3.0) == Approx(0.5));
  CHECK(implied_alpha((2.0 - 0.3) / 0.7) == Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(implied_alpha(1.0), DomainError);
}

TEST_CASE("compensated sums survive cancellation") {
  // Large offset plus tiny spread: naive one-pass variance loses everything.
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(1e9 + (i % 2 == 0 ? 1.0 : -1.0));
  const auto s = summarize(x);
  CHECK(s.mean == Approx(1e9));
  CHECK(s.variance == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("describe names each limit") {
  CHECK_FALSE(describe(limit::Variance{}).empty());
  CHECK(describe(limit::MomentRatio{3.0, 1.0}) != describe(limit::Variance{}));
}

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "taylorlaw/distributions.hpp"
#include "taylorlaw/error.hpp"

using namespace taylorlaw;
using Catch::Approx;

TEST_CASE("Pareto inverse CDF hand values") {
  CHECK(pareto_from_uniform(1.0, 0.5, 0.75) == Approx(16.0));
  CHECK(pareto_from_uniform(2.0, 1.0, 0.5) == Approx(4.0));
  CHECK(pareto_from_uniform(3.0, 2.0, 0.0) == 3.0);
}

TEST_CASE("samplers are deterministic in (seed, replicate)") {
  const auto a = sample_pareto(1.0, 0.5, 1000, 42, 3);
  const auto b = sample_pareto(1.0, 0.5, 1000, 42, 3);
  const auto c = sample_pareto(1.0, 0.5, 1000, 42, 4);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(*std::min_element(a.values.begin(), a.values.end()) >= 1.0);
}

TEST_CASE("Pareto empirical survival tracks the model") {
  const auto s = sample_pareto(1.0, 0.5, 200'000, 1).values;
  const double above_100 = static_cast<double>(std::count_if(s.begin(), s.end(), [](double x) { return x > 100.0; }));
  CHECK(above_100 / 200'000.0 == Approx(0.1).margin(0.003));
}

TEST_CASE("F1 sampler envelope dominates the density ratio") {
  const F1Sampler f1(0.5);
  CHECK(f1.support_min() == Approx(std::exp(2.0)));
  CHECK(f1.proposal_alpha() == Approx(0.45));
  CHECK(f1.cdf(f1.support_min()) == Approx(0.0).margin(1e-15));
  double worst = 0.0;
  for (double lx = 2.0; lx < 200.0; lx += 0.01) worst = std::max(worst, f1.density_ratio(std::exp(lx)));
  CHECK(worst <= f1.density_ratio_sup() * (1.0 + 1e-9));
  CHECK(worst >= f1.density_ratio_sup() * 0.999);
  CHECK(f1.envelope() >= f1.density_ratio_sup());
}

TEST_CASE("one-sided stable: Levy case CDF is erfc(sqrt(c / (4x)))") {
  const auto s = sample_stable_one_sided(1.0, 0.5, 200'000, 5).values;
  for (const double x : {0.5, 1.0, 4.0}) {
    const double emp = static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= x; })) / 200'000.0;
    CHECK(emp == Approx(std::erfc(std::sqrt(1.0 / (4.0 * x)))).margin(0.006));
  }
}

TEST_CASE("AR(1) recursion consumes burn-in") {
  const std::vector<double> noise{1.0, 1.0, 1.0, 1.0};
  const auto x = ar1_recursion(0.5, noise, 1);
  REQUIRE(x.size() == 3);
  CHECK(x[0] == 1.5);
  CHECK(x[1] == 1.75);
  CHECK(x[2] == 1.875);
}

TEST_CASE("Gaussian AR(1) has unit variance and lag-one correlation exp(-1/L)") {
  Rng rng(8);
  const auto g = gaussian_ar1(400'000, 10.0, rng);
  double s2 = 0.0, lag = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s2 += g[i] * g[i];
    if (i > 0) lag += g[i] * g[i - 1];
  }
  CHECK(s2 / g.size() == Approx(1.0).margin(0.03));
  CHECK(lag / s2 == Approx(std::exp(-0.1)).margin(0.01));
}

TEST_CASE("equicorrelated marginal tail is sqrt(2/pi) x^-alpha") {
  const ProcessSpec spec{process::Equicorrelated{0.5, 0.1}};
  // Average over replicates: the common factor makes one sequence noisy.
  double hits = 0.0, total = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto s = sample_process(spec, 20'000, 4, r).values;
    hits += static_cast<double>(std::count_if(s.begin(), s.end(), [](double v) { return v > 1e4; }));
    total += static_cast<double>(s.size());
  }
  CHECK(hits / total == Approx(std::sqrt(2.0 / M_PI) * 1e-2).epsilon(0.05));
}

TEST_CASE("heterogeneous mixture draws from both components") {
  const ProcessSpec spec{process::Heterogeneous{0.6, TailModel::pareto(10.0, 0.5), TailModel::pareto(1.0, 0.8)}};
  const auto s = sample_process(spec, 100'000, 2).values;
  const double heavy = static_cast<double>(std::count_if(s.begin(), s.end(), [](double v) { return v >= 10.0; }));
  // Light part exceeds 10 with probability 10^-0.8.
  CHECK(heavy / 1e5 == Approx(0.6 + 0.4 * std::pow(10.0, -0.8)).margin(0.01));
}

TEST_CASE("network process yields one value per node") {
  process::NetworkRule rule;
  const ProcessSpec spec{process::Network{rule, TailModel::pareto(1.0, 0.5)}};
  const auto s = sample_process(spec, 500, 3);
  CHECK(s.size() == 500);
  CHECK(sample_process(spec, 500, 3).values == s.values);
  rule.staged = true;
  CHECK(rule.mean_degree_for(999) == 10.0);
  CHECK(rule.mean_degree_for(1000) == 100.0);
  CHECK(rule.cap_for(999) == std::optional<std::size_t>(20));
  CHECK(rule.cap_for(5000) == std::optional<std::size_t>(200));
}

TEST_CASE("invalid recipes throw ParameterError") {
  CHECK_THROWS_AS((ProcessSpec{process::Ar1{1.2, TailModel::pareto(1.0, 0.5), 10}}.validate()), ParameterError);
  CHECK_THROWS_AS((ProcessSpec{process::Equicorrelated{0.5, 1.5}}.validate()), ParameterError);
  CHECK_THROWS_AS((ProcessSpec{process::GaussianModulated{0.5, -1.0}}.validate()), ParameterError);
  CHECK_THROWS_AS((ProcessSpec{process::Stable{1.0, 1.0}}.validate()), ParameterError);
  CHECK_THROWS_AS(
      (ProcessSpec{process::Heterogeneous{1.5, TailModel::pareto(1.0, 0.5), TailModel::pareto(1.0, 0.8)}}.validate()),
      ParameterError);
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "taylorlaw/asymptotics.hpp"
#include "taylorlaw/error.hpp"

using namespace taylorlaw;
using Catch::Approx;

TEST_CASE("c_n rules") {
  CHECK(c_n(CRule::Log, 1000) == Approx(std::log(1000.0)));
  CHECK(c_n(CRule::LogLog, 1000) == Approx(std::log(std::log(1000.0))));
  CHECK(c_n(CRule::SqrtLog, 1000) == Approx(std::sqrt(std::log(1000.0))));
  CHECK(c_n(CRule::Unit, 1000) == 1.0);
  CHECK(parse_c_rule("loglog") == CRule::LogLog);
  CHECK(to_string(CRule::SqrtLog) == "sqrtlog");
  CHECK_THROWS_AS(parse_c_rule("cubic"), ParameterError);
  CHECK_THROWS_AS(c_n(CRule::Log, 1), ParameterError);
}

TEST_CASE("marginal tail constants of the process recipes") {
  const auto pareto = TailModel::pareto(1.0, 0.5);
  CHECK(marginal_tail(ProcessSpec{process::Iid{pareto}}).tail_constant == 1.0);
  CHECK(marginal_tail(ProcessSpec{process::Ar1{0.8, pareto, 100}}).tail_constant ==
        Approx(1.0 / (1.0 - std::sqrt(0.8))));
  CHECK(marginal_tail(ProcessSpec{process::Equicorrelated{0.5, 0.1}}).tail_constant == Approx(std::sqrt(2.0 / M_PI)));
  CHECK(marginal_tail(ProcessSpec{process::GaussianModulated{0.5, 100.0}}).tail_constant ==
        Approx(std::exp(0.125)));
  CHECK(marginal_tail(ProcessSpec{process::Stable{1.0, 0.5}}).tail_constant == Approx(1.0 / std::sqrt(M_PI)));
  CHECK(marginal_tail(ProcessSpec{process::Heterogeneous{0.6, pareto, TailModel::pareto(1.0, 0.8)}}).tail_constant ==
        Approx(0.6));
  CHECK(marginal_tail(ProcessSpec{process::Heterogeneous{0.6, pareto, TailModel::pareto(1.0, 0.5)}}).tail_constant ==
        Approx(1.0));
  process::NetworkRule rule;
  CHECK(marginal_tail(ProcessSpec{process::Network{rule, pareto}}).tail_constant == Approx(1.0 + std::sqrt(10.0)));
}

TEST_CASE("thresholds for constant l have closed forms") {
  const MarginalTail m(TailModel::pareto(1.0, 0.5));
  const double c = std::log(100.0);
  CHECK(solve_threshold(m, 100, ThresholdTarget::T) == Approx(std::pow(100.0 * c, 2.0)).epsilon(1e-10));
  CHECK(solve_threshold(m, 100, ThresholdTarget::V) == Approx(std::pow(100.0 / c, 2.0)).epsilon(1e-10));
  CHECK(solve_threshold(m, 100, ThresholdTarget::T) == Approx(212'075.92).epsilon(1e-7));
  const double v = solve_threshold(m, 1'000'000, ThresholdTarget::V, CRule::LogLog);
  CHECK(std::abs(threshold_residual(m, 1'000'000, ThresholdTarget::V, CRule::LogLog, v)) <= 1e-10);
}

TEST_CASE("truncated moments against the Pareto closed form") {
  const MarginalTail m(TailModel::pareto(1.0, 0.5));
  CHECK(truncated_moment_exact(m, 1.0, 1e4) == Approx(99.0).epsilon(1e-12));
  CHECK(truncated_moment_theory(m, 1.0, 1e4) == Approx(100.0).epsilon(1e-12));
  CHECK(truncated_moment_exact(m, 2.0, 1e4) == Approx((1e6 - 1.0) / 3.0).epsilon(1e-12));
  CHECK(truncated_moment_exact(m, 1.0, 1e4, true) == Approx(99.0 / (1.0 - 0.01)).epsilon(1e-12));
  CHECK_THROWS_AS(truncated_moment_theory(m, 0.5, 1e4), RegimeError);
  CHECK_THROWS_AS(truncated_moment_exact(m, 1.0, 0.5), ParameterError);

  // Non-Pareto law: quadrature must match a brute-force Riemann sum.
  const MarginalTail f1(TailModel::f1(0.5));
  const double t = 1e6;
  double brute = 0.0;
  const double lo = std::log(f1.model.x_min()), hi = std::log(t);
  const int steps = 2'000'000;
  const double h = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double u0 = lo + i * h, u1 = u0 + h;
    const double density_mass = f1.survival(std::exp(u0)) - f1.survival(std::exp(u1));
    brute += std::exp(0.5 * (u0 + u1)) * density_mass;
  }
  CHECK(truncated_moment_exact(f1, 1.0, t) == Approx(brute).epsilon(1e-6));
}

TEST_CASE("asymptotic context") {
  const MarginalTail m(TailModel::pareto(1.0, 0.5));
  CHECK(default_delta_prime(1.0, 0.5) == Approx(2.2));
  CHECK(default_delta_prime(0.5, 0.5) == Approx(0.1));
  const auto ctx = make_context(m, 1000);
  CHECK(ctx.c_n == Approx(std::log(1000.0)));
  CHECK(ctx.d_n1 == Approx(truncated_moment_exact(m, 1.0, ctx.t_n)));
  CHECK(ctx.b_n == Approx(ctx.d_n1 / std::pow(ctx.c_n, 2.0 * ctx.delta_prime)));
  CHECK(ctx.b_tilde_n == Approx(ctx.d_n1 * ctx.c_n));
  CHECK(ctx.t_n > ctx.v_n);
  CHECK_THROWS_AS(make_context(m, 1000, 1.0, CRule::Log, -1.0), ParameterError);
}

TEST_CASE("covariance probe on i.i.d. data") {
  const ProcessSpec spec{process::Iid{TailModel::pareto(1.0, 0.5)}};
  const auto report = condition_a_probe(spec, 1.0, {100, 1000}, 100, 5);
  CHECK(report.points.size() == 2);
  CHECK(report.groups == 10);
  CHECK(report.consistent());
  for (const auto& p : report.points) CHECK(std::abs(p.ratio) <= 4.0 * p.ratio_se + 1e-12);
  const auto again = condition_a_probe(spec, 1.0, {100, 1000}, 100, 5);
  CHECK(again.points[1].covariance_sum == report.points[1].covariance_sum);
  CHECK_THROWS_AS(condition_a_probe(spec, 1.0, {100}, 9, 5), DomainError);
  CHECK(to_string(ProbeVerdict::Decreasing) == "decreasing");
}

TEST_CASE("covariance probe detects AR(1) dependence") {
  const ProcessSpec spec{process::Ar1{0.8, TailModel::pareto(1.0, 0.5), 1000}};
  const auto report = condition_a_probe(spec, 1.0, {100, 1000, 10000}, 200, 7);
  // Positive covariance of the truncated values at the smallest n.
  CHECK(report.points.front().covariance_sum > 3.0 * report.points.front().standard_error);
}

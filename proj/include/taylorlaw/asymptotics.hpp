#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taylorlaw/distributions.hpp"
#include "taylorlaw/tail_model.hpp"

namespace taylorlaw {

// Growth sequences c_n with n c_n increasing and log c_n = o(log n).
enum class CRule { Log, LogLog, SqrtLog, Unit };

std::string to_string(CRule rule);
// Accepts "log", "loglog", "sqrtlog", "unit"; ParameterError otherwise.
CRule parse_c_rule(const std::string& name);
double c_n(CRule rule, std::size_t n);

// A marginal survival function tail_constant * model.survival(x), capped at
// 1. For dependent constructions the constant carries the asymptotic tail
// weight of the marginal relative to the input law.
struct MarginalTail {
  TailModel model;
  double tail_constant = 1.0;

  MarginalTail(TailModel m, double constant = 1.0);  // NOLINT: implicit on purpose

  double alpha() const noexcept { return model.alpha(); }
  double survival(double x) const;
  double log_survival(double x) const;
  // x^alpha * survival(x).
  double l(double x) const;
};

// Asymptotic marginal of a process recipe. Exact for Iid; for the other
// kinds the tail constant is the limit of x^alpha P(X > x) / (input l):
// AR(1) 1 / (1 - beta1^alpha), equicorrelated sqrt(2 / pi), Gaussian
// modulation exp(alpha^2 / 2), one-sided stable c^alpha / Gamma(1 - alpha),
// mixtures p_star (plus 1 - p_star when both parts share alpha), network
// 1 + mean_degree^(1 - alpha).
MarginalTail marginal_tail(const ProcessSpec& spec, std::size_t n = 0);

enum class ThresholdTarget {
  T,  // n c_n l(t) / t^alpha = 1
  V,  // n l(v) / v^alpha = c_n
};

// Bisection on log x from the support lower bound over a doubling bracket,
// to |log residual| <= 1e-11. SolverError when there is no sign change.
double solve_threshold(const MarginalTail& marginal, std::size_t n, ThresholdTarget target,
                       CRule rule = CRule::Log);

// Relative residual of the defining equation at x.
double threshold_residual(const MarginalTail& marginal, std::size_t n, ThresholdTarget target,
                          CRule rule, double x);

// (alpha / (p - alpha)) t^(p - alpha) l(t). RegimeError when p <= alpha.
double truncated_moment_theory(const MarginalTail& marginal, double p, double t);

// E[X^p 1(X < t)] by adaptive Gauss-Kronrod quadrature of
// p x^(p-1) (S(x) - S(t)); with conditional = true, E[X^p | X < t].
double truncated_moment_exact(const MarginalTail& marginal, double p, double t,
                              bool conditional = false);

struct AsymptoticContext {
  MarginalTail marginal;
  CRule c_rule = CRule::Log;
  std::size_t n = 0;
  double p = 1.0;
  double c_n = 0.0;
  double t_n = 0.0;
  double v_n = 0.0;
  double delta_prime = 0.0;
  double d_n1 = 0.0;  // E[X 1(X < t_n)]
  double b_n = 0.0;   // d_n1 / c_n^(2 delta')
  double b_tilde_n = 0.0;  // d_n1 c_n
};

// Default delta' is 1.1 * 2 (p / alpha - 1), or 0.1 when that is not positive.
double default_delta_prime(double p, double alpha);

AsymptoticContext make_context(const MarginalTail& marginal, std::size_t n, double p = 1.0,
                               CRule rule = CRule::Log,
                               std::optional<double> delta_prime = std::nullopt);

struct ProbePoint {
  std::size_t n = 0;
  double c_n = 0.0;
  double v_n = 0.0;
  double covariance_sum = 0.0;  // estimate of sum_{i != j} Cov(Y_i, Y_j)
  double standard_error = 0.0;
  double ratio = 0.0;  // covariance_sum / (v_n^(2p) c_n^2)
  double ratio_se = 0.0;
};

enum class ProbeVerdict { IndistinguishableFromZero, Decreasing, NotDecreasing };

std::string to_string(ProbeVerdict verdict);

struct ProbeReport {
  double p = 1.0;
  std::size_t replicates = 0;
  std::size_t groups = 0;
  std::vector<ProbePoint> points;
  ProbeVerdict verdict = ProbeVerdict::NotDecreasing;

  // True unless the ratios grow with n.
  bool consistent() const noexcept { return verdict != ProbeVerdict::NotDecreasing; }
};

struct ProbeOptions {
  CRule c_rule = CRule::Log;
  std::size_t max_groups = 10;
};

// Monte Carlo probe of the covariance condition on Y_i = X_i^p 1(X_i < v_n).
// Per n: replicates sequences from spec; the covariance sum is
// Var(sum Y) - sum_i Var(Y_i) with both terms centred at replicate means.
// Its standard error comes from batch means over groups of replicates.
ProbeReport condition_a_probe(const ProcessSpec& spec, double p, const std::vector<std::size_t>& n_grid,
                              std::size_t replicates, std::uint64_t seed,
                              const ProbeOptions& options = {});

}  // namespace taylorlaw

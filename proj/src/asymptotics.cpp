#include "taylorlaw/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "taylorlaw/error.hpp"
#include "taylorlaw/numerics.hpp"
#include "taylorlaw/parallel.hpp"

namespace taylorlaw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kMaxDoublings = 1000;
constexpr double kLogResidualTolerance = 1e-11;
constexpr std::uint64_t kProbeSalt = 0x70726F6265ULL;

double log_threshold_gap(const MarginalTail& m, std::size_t n, ThresholdTarget target, double log_cn,
                         double log_x) {
  // log of n l(x) / x^alpha is log n + log survival(x).
  const double log_mass = std::log(static_cast<double>(n)) + m.log_survival(std::exp(log_x));
  return target == ThresholdTarget::T ? log_mass + log_cn : log_mass - log_cn;
}

}  // namespace

std::string to_string(CRule rule) {
  switch (rule) {
    case CRule::Log:
      return "log";
    case CRule::LogLog:
      return "loglog";
    case CRule::SqrtLog:
      return "sqrtlog";
    case CRule::Unit:
      return "unit";
  }
  return "unknown";
}

CRule parse_c_rule(const std::string& name) {
  if (name == "log") return CRule::Log;
  if (name == "loglog") return CRule::LogLog;
  if (name == "sqrtlog") return CRule::SqrtLog;
  if (name == "unit") return CRule::Unit;
  throw ParameterError("unknown c_n rule '" + name + "' (expected log, loglog, sqrtlog or unit)");
}

double c_n(CRule rule, std::size_t n) {
  const double nd = static_cast<double>(n);
  switch (rule) {
    case CRule::Log:
      if (n < 2) throw ParameterError("c_n = log n needs n >= 2");
      return std::log(nd);
    case CRule::LogLog:
      if (n < 3) throw ParameterError("c_n = log log n needs n >= 3");
      return std::log(std::log(nd));
    case CRule::SqrtLog:
      if (n < 2) throw ParameterError("c_n = sqrt(log n) needs n >= 2");
      return std::sqrt(std::log(nd));
    case CRule::Unit:
      if (n < 1) throw ParameterError("n must be positive");
      return 1.0;
  }
  throw ParameterError("unknown c_n rule");
}

MarginalTail::MarginalTail(TailModel m, double constant) : model(std::move(m)), tail_constant(constant) {
  if (!(constant > 0.0) || !std::isfinite(constant)) {
    throw ParameterError("marginal tail constant must be positive");
  }
}

double MarginalTail::log_survival(double x) const {
  return std::min(0.0, std::log(tail_constant) + model.log_survival(x));
}

double MarginalTail::survival(double x) const { return std::exp(log_survival(x)); }

double MarginalTail::l(double x) const {
  return std::exp(model.alpha() * std::log(x) + log_survival(x));
}

MarginalTail marginal_tail(const ProcessSpec& spec, std::size_t n) {
  spec.validate();
  return std::visit(
      Overloaded{
          [](const process::Iid& s) { return MarginalTail(s.model); },
          [](const process::Stable& s) {
            return MarginalTail(TailModel::pareto(1.0, s.alpha),
                                std::pow(s.c, s.alpha) / std::tgamma(1.0 - s.alpha));
          },
          [](const process::Ar1& s) {
            return MarginalTail(s.noise, 1.0 / (1.0 - std::pow(s.beta1, s.noise.alpha())));
          },
          [](const process::Equicorrelated& s) {
            return MarginalTail(TailModel::pareto(1.0, s.alpha), std::sqrt(2.0 / std::numbers::pi));
          },
          [](const process::GaussianModulated& s) {
            return MarginalTail(TailModel::pareto(1.0, s.alpha), std::exp(s.alpha * s.alpha / 2.0));
          },
          [](const process::Heterogeneous& s) {
            if (s.model_u.alpha() < s.model_v.alpha()) return MarginalTail(s.model_u, s.p_star);
            constexpr double kFar = 1e12;
            const double share = s.model_v.effective_l(kFar) / s.model_u.effective_l(kFar);
            return MarginalTail(s.model_u, s.p_star + (1.0 - s.p_star) * share);
          },
          [n](const process::Network& s) {
            const double d = n > 0 ? s.graph.mean_degree_for(n) : s.graph.mean_degree;
            return MarginalTail(s.z_model, 1.0 + std::pow(d, 1.0 - s.z_model.alpha()));
          },
      },
      spec.kind);
}

double threshold_residual(const MarginalTail& marginal, std::size_t n, ThresholdTarget target, CRule rule,
                          double x) {
  const double cn = c_n(rule, n);
  const double mass = static_cast<double>(n) * marginal.survival(x);
  return target == ThresholdTarget::T ? mass * cn - 1.0 : mass / cn - 1.0;
}

double solve_threshold(const MarginalTail& marginal, std::size_t n, ThresholdTarget target, CRule rule) {
  const double log_cn = std::log(c_n(rule, n));
  double lo = std::log(marginal.model.x_min());
  if (!(log_threshold_gap(marginal, n, target, log_cn, lo) > 0.0)) {
    std::ostringstream msg;
    msg << "threshold equation has no root above the support minimum for n = " << n
        << " (n too small for c_n rule " << to_string(rule) << ")";
    throw SolverError(msg.str());
  }
  double width = 1.0;
  double hi = lo + width;
  int doublings = 0;
  while (log_threshold_gap(marginal, n, target, log_cn, hi) > 0.0) {
    if (++doublings > kMaxDoublings || !std::isfinite(std::exp(hi))) {
      throw SolverError("threshold equation: no sign change within the doubling budget");
    }
    lo = hi;
    width *= 2.0;
    hi = lo + width;
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 400; ++i) {
    mid = 0.5 * (lo + hi);
    const double gap = log_threshold_gap(marginal, n, target, log_cn, mid);
    if (std::abs(gap) <= kLogResidualTolerance) break;
    if (gap > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::abs(mid)) break;
  }
  return std::exp(mid);
}

double truncated_moment_theory(const MarginalTail& marginal, double p, double t) {
  const double alpha = marginal.alpha();
  if (!(p > alpha)) {
    std::ostringstream msg;
    msg << "truncated moment of order p = " << p << " diverges relative to t for tail index " << alpha
        << " (need p > alpha)";
    throw RegimeError(msg.str());
  }
  if (!(t > marginal.model.x_min())) throw ParameterError("truncation point must exceed x_min");
  return alpha / (p - alpha) * std::pow(t, p - alpha) * marginal.l(t);
}

double truncated_moment_exact(const MarginalTail& marginal, double p, double t, bool conditional) {
  if (!(p > 0.0)) throw ParameterError("moment order must be positive");
  const double x_lo = marginal.model.x_min();
  if (!(t > x_lo)) throw ParameterError("truncation point must exceed x_min");
  const double s_t = marginal.survival(t);
  auto integrand = [&](double u) {
    const double x = std::exp(u);
    return p * std::exp(p * u) * (marginal.survival(x) - s_t);
  };
  const double a = std::log(x_lo), b = std::log(t);
  constexpr int kPieces = 16;
  CompensatedSum total;
  total += std::pow(x_lo, p) * (1.0 - s_t);
  for (int i = 0; i < kPieces; ++i) {
    const double u0 = a + (b - a) * i / kPieces;
    const double u1 = a + (b - a) * (i + 1) / kPieces;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, u0, u1, 15, 1e-13);
  }
  const double value = total.value();
  return conditional ? value / (1.0 - s_t) : value;
}

double default_delta_prime(double p, double alpha) {
  const double base = 2.0 * (p / alpha - 1.0);
  return base > 0.0 ? 1.1 * base : 0.1;
}

AsymptoticContext make_context(const MarginalTail& marginal, std::size_t n, double p, CRule rule,
                               std::optional<double> delta_prime) {
  if (delta_prime && !(*delta_prime > 0.0)) throw ParameterError("delta' must be positive");
  AsymptoticContext ctx{marginal};
  ctx.c_rule = rule;
  ctx.n = n;
  ctx.p = p;
  ctx.c_n = c_n(rule, n);
  ctx.t_n = solve_threshold(marginal, n, ThresholdTarget::T, rule);
  ctx.v_n = solve_threshold(marginal, n, ThresholdTarget::V, rule);
  ctx.delta_prime = delta_prime.value_or(default_delta_prime(p, marginal.alpha()));
  ctx.d_n1 = truncated_moment_exact(marginal, 1.0, ctx.t_n);
  ctx.b_n = ctx.d_n1 / std::pow(ctx.c_n, 2.0 * ctx.delta_prime);
  ctx.b_tilde_n = ctx.d_n1 * ctx.c_n;
  return ctx;
}

std::string to_string(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::IndistinguishableFromZero:
      return "indistinguishable_from_zero";
    case ProbeVerdict::Decreasing:
      return "decreasing";
    case ProbeVerdict::NotDecreasing:
      return "not_decreasing";
  }
  return "unknown";
}

namespace {

struct ProbeAccumulator {
  std::size_t replicates = 0;
  CompensatedSum sum_s;
  CompensatedSum sum_s2;
  CompensatedSum sum_q;
  std::vector<double> sum_y;  // per position, over replicates

  void merge(const ProbeAccumulator& other) {
    replicates += other.replicates;
    sum_s += other.sum_s.value();
    sum_s2 += other.sum_s2.value();
    sum_q += other.sum_q.value();
    if (sum_y.empty()) sum_y.assign(other.sum_y.size(), 0.0);
    for (std::size_t i = 0; i < sum_y.size(); ++i) sum_y[i] += other.sum_y[i];
  }

  // (1 / (R - 1)) sum_r sum_{i != j} (Y_ir - mean_i)(Y_jr - mean_j).
  double covariance_sum() const {
    const double r = static_cast<double>(replicates);
    CompensatedSum centre;
    for (const double s : sum_y) centre += s * s;
    const double s = sum_s.value();
    return (sum_s2.value() - sum_q.value() - (s * s - centre.value()) / r) / (r - 1.0);
  }
};

}  // namespace

ProbeReport condition_a_probe(const ProcessSpec& spec, double p, const std::vector<std::size_t>& n_grid,
                              std::size_t replicates, std::uint64_t seed, const ProbeOptions& options) {
  if (replicates < 10) throw DomainError("the covariance probe needs at least 10 replicates for a usable SE");
  if (!(p > 0.0)) throw ParameterError("moment order p must be positive");
  if (n_grid.empty()) throw ParameterError("probe needs a nonempty n grid");
  spec.validate();
  const std::size_t groups = std::clamp<std::size_t>(replicates / 2, 2, std::max<std::size_t>(options.max_groups, 2));

  ProbeReport report;
  report.p = p;
  report.replicates = replicates;
  report.groups = groups;
  for (const std::size_t n : n_grid) {
    const MarginalTail marginal = marginal_tail(spec, n);
    ProbePoint point;
    point.n = n;
    point.c_n = c_n(options.c_rule, n);
    point.v_n = solve_threshold(marginal, n, ThresholdTarget::V, options.c_rule);
    const std::uint64_t seed_n = derive_seed(seed ^ kProbeSalt, n);

    std::vector<ProbeAccumulator> per_group(groups);
    parallel_for(groups, [&](std::size_t g) {
      auto& acc = per_group[g];
      acc.sum_y.assign(n, 0.0);
      // Replicates are dealt round-robin so every group size differs by at most one.
      for (std::size_t r = g; r < replicates; r += groups) {
        const SampleSet sample = sample_process(spec, n, seed_n, r);
        CompensatedSum s, q;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = sample.values[i];
          const double y = x < point.v_n ? power(x, p) : 0.0;
          s += y;
          q += y * y;
          acc.sum_y[i] += y;
        }
        acc.sum_s += s.value();
        acc.sum_s2 += s.value() * s.value();
        acc.sum_q += q.value();
        ++acc.replicates;
      }
    });

    ProbeAccumulator all;
    std::vector<double> group_estimates;
    for (const auto& acc : per_group) {
      all.merge(acc);
      group_estimates.push_back(acc.covariance_sum());
    }
    point.covariance_sum = all.covariance_sum();
    CompensatedSum gm;
    for (const double e : group_estimates) gm += e;
    const double mean_g = gm.value() / static_cast<double>(groups);
    CompensatedSum gss;
    for (const double e : group_estimates) gss += (e - mean_g) * (e - mean_g);
    // Each group estimate uses ~R/G replicates, so its spread over-states the
    // error of the pooled estimate by a factor sqrt(G).
    point.standard_error = std::sqrt(gss.value() / static_cast<double>(groups - 1)) / std::sqrt(static_cast<double>(groups));
    const double scale = std::pow(point.v_n, 2.0 * p) * point.c_n * point.c_n;
    point.ratio = point.covariance_sum / scale;
    point.ratio_se = point.standard_error / scale;
    report.points.push_back(point);
  }

  const auto& pts = report.points;
  const bool all_zero = std::all_of(pts.begin(), pts.end(), [](const ProbePoint& pt) {
    return std::abs(pt.ratio) <= 3.0 * pt.ratio_se;
  });
  bool decreasing = pts.size() < 2 || pts.back().ratio < pts.front().ratio;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double slack = 2.0 * std::hypot(pts[k].ratio_se, pts[k - 1].ratio_se);
    if (pts[k].ratio > pts[k - 1].ratio + slack) decreasing = false;
  }
  report.verdict = all_zero ? ProbeVerdict::IndistinguishableFromZero
                            : (decreasing ? ProbeVerdict::Decreasing : ProbeVerdict::NotDecreasing);
  return report;
}

}  // namespace taylorlaw

#include "taylorlaw/tail_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "taylorlaw/error.hpp"

namespace taylorlaw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kValidationPoints = 600;
constexpr double kValidationLogSpan = 60.0;
constexpr double kMonotoneSlack = 1e-12;

}  // namespace

std::string describe(const SlowlyVarying& l) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const slowly_varying::Constant& c) { out << "constant(" << c.c << ")"; },
                 [&](const slowly_varying::LogTimesE&) { out << "e*alpha*log(x)"; },
                 [&](const slowly_varying::PowLog& p) { out << "log(x)^" << p.beta; },
                 [&](const slowly_varying::ExpLogBeta& p) {
                   out << "exp(" << (p.sign > 0 ? "+" : "-") << "log(x)^" << p.beta << ")";
                 },
             },
             l);
  return out.str();
}

TailModel::TailModel(double alpha, SlowlyVarying l, double x_min)
    : alpha_(alpha), l_(l), x_min_(x_min), log_norm_(0.0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("tail index alpha must be positive and finite");
  }
  if (!(x_min > 0.0) || !std::isfinite(x_min)) {
    throw ParameterError("support lower bound x_min must be positive and finite");
  }
  std::visit(Overloaded{
                 [](const slowly_varying::Constant& c) {
                   if (!(c.c > 0.0) || !std::isfinite(c.c)) {
                     throw ParameterError("constant slowly varying factor must be positive");
                   }
                 },
                 [](const slowly_varying::LogTimesE&) {},
                 [](const slowly_varying::PowLog& p) {
                   if (!std::isfinite(p.beta)) throw ParameterError("PowLog beta must be finite");
                 },
                 [](const slowly_varying::ExpLogBeta& p) {
                   if (p.sign != 1 && p.sign != -1) {
                     throw ParameterError("ExpLogBeta sign must be +1 or -1");
                   }
                   if (!(p.beta > 0.0 && p.beta < 1.0)) {
                     throw ParameterError("ExpLogBeta beta must lie in (0, 1)");
                   }
                 },
             },
             l_);

  const double log_x_min = std::log(x_min_);
  log_norm_ = -alpha_ * log_x_min + log_raw_l(log_x_min);
  if (!std::isfinite(log_norm_)) {
    throw ParameterError("slowly varying factor " + taylorlaw::describe(l_) +
                         " is not positive at x_min");
  }

  double previous = 0.0;
  for (int i = 1; i <= kValidationPoints; ++i) {
    const double log_x = log_x_min + kValidationLogSpan * i / kValidationPoints;
    const double value = -alpha_ * log_x + log_raw_l(log_x) - log_norm_;
    if (!(value <= kMonotoneSlack) || value > previous + kMonotoneSlack) {
      throw ParameterError("survival function of " + describe() +
                           " is not a nonincreasing function bounded by 1 on [x_min, inf)");
    }
    previous = value;
  }
}

TailModel TailModel::pareto(double x_min, double alpha) {
  return TailModel(alpha, slowly_varying::Constant{1.0}, x_min);
}

TailModel TailModel::f1(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("F1 tail index must be positive");
  return TailModel(alpha, slowly_varying::LogTimesE{}, std::exp(1.0 / alpha));
}

double TailModel::log_raw_l(double log_x) const {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  return std::visit(
      Overloaded{
          [&](const slowly_varying::Constant& c) { return std::log(c.c); },
          [&](const slowly_varying::LogTimesE&) {
            return log_x > 0.0 ? 1.0 + std::log(alpha_) + std::log(log_x) : neg_inf;
          },
          [&](const slowly_varying::PowLog& p) {
            return log_x > 0.0 ? p.beta * std::log(log_x) : neg_inf;
          },
          [&](const slowly_varying::ExpLogBeta& p) {
            return log_x >= 0.0 ? p.sign * std::pow(log_x, p.beta) : neg_inf;
          },
      },
      l_);
}

double TailModel::raw_l(double x) const { return std::exp(log_raw_l(std::log(x))); }

double TailModel::log_survival(double x) const {
  if (x <= x_min_) return 0.0;
  const double log_x = std::log(x);
  return std::min(0.0, -alpha_ * log_x + log_raw_l(log_x) - log_norm_);
}

double TailModel::survival(double x) const { return std::exp(log_survival(x)); }

double TailModel::effective_l(double x) const {
  return std::exp(alpha_ * std::log(x) + log_survival(x));
}

double TailModel::inverse_survival(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw ParameterError("inverse_survival needs u in (0, 1]");
  if (u == 1.0) return x_min_;
  if (const auto* c = std::get_if<slowly_varying::Constant>(&l_)) {
    (void)c;
    return x_min_ * std::pow(u, -1.0 / alpha_);
  }
  const double target = std::log(u);
  double lo = std::log(x_min_);
  double width = std::max(1.0, -2.0 * target / alpha_);
  double hi = lo + width;
  for (int i = 0; log_survival(std::exp(hi)) > target; ++i) {
    if (i >= 64 || !std::isfinite(std::exp(hi))) {
      throw SolverError("inverse_survival: no bracket found for u=" + std::to_string(u));
    }
    lo = hi;
    width *= 2.0;
    hi = lo + width;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (log_survival(std::exp(mid)) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(hi);
}

std::string TailModel::describe() const {
  std::ostringstream out;
  out << "TailModel(alpha=" << alpha_ << ", l=" << taylorlaw::describe(l_)
      << ", x_min=" << x_min_ << ")";
  return out.str();
}

}  // namespace taylorlaw

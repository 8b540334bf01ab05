#pragma once

#include <string>
#include <variant>

namespace taylorlaw {

class Rng;

namespace slowly_varying {

// l(x) = c.
struct Constant {
  double c = 1.0;
};
// l(x) = e * alpha * log x, the factor of the F_{1,alpha} law.
struct LogTimesE {};
// l(x) = (log x)^beta.
struct PowLog {
  double beta = 1.0;
};
// l(x) = exp(sign * (log x)^beta), sign in {-1, +1}, beta in (0, 1).
struct ExpLogBeta {
  int sign = 1;
  double beta = 0.5;
};

}  // namespace slowly_varying

using SlowlyVarying =
    std::variant<slowly_varying::Constant, slowly_varying::LogTimesE,
                 slowly_varying::PowLog, slowly_varying::ExpLogBeta>;

std::string describe(const SlowlyVarying& l);

// Survival law P(X > x) = x^{-alpha} l(x) on [x_min, inf), normalised so that
// survival(x_min) = 1. Construction validates that the normalised survival is
// in [0, 1] and nonincreasing on a log-spaced grid; invalid combinations
// (e.g. PowLog with log x_min < beta / alpha) throw ParameterError.
class TailModel {
 public:
  TailModel(double alpha, SlowlyVarying l, double x_min);

  // Pareto(x_min, alpha): survival (x / x_min)^{-alpha}.
  static TailModel pareto(double x_min, double alpha);
  // F_{1,alpha}(x) = 1 - x^{-alpha} log(x) e alpha on x >= exp(1/alpha).
  static TailModel f1(double alpha);

  double alpha() const noexcept { return alpha_; }
  double x_min() const noexcept { return x_min_; }
  const SlowlyVarying& slowly_varying() const noexcept { return l_; }

  // The declared l(x), before normalisation.
  double raw_l(double x) const;
  // x^alpha * survival(x): the slowly varying factor of the sampling law.
  double effective_l(double x) const;
  double survival(double x) const;
  double log_survival(double x) const;
  // Smallest x with survival(x) <= u, for u in (0, 1].
  double inverse_survival(double u) const;

  std::string describe() const;

 private:
  double log_raw_l(double log_x) const;

  double alpha_;
  SlowlyVarying l_;
  double x_min_;
  double log_norm_;  // log of x_min^{-alpha} l(x_min)
};

// One draw from the model's law: closed-form inversion for Pareto,
// acceptance-rejection for F_{1,alpha}, numerical inversion otherwise.
double draw(const TailModel& model, Rng& rng);

}  // namespace taylorlaw

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "taylorlaw/distributions.hpp"

namespace taylorlaw {

struct MomentOrders {
  std::vector<double> raw{1.0, 2.0, 3.0};  // order 1 is always added
  std::vector<int> central{2, 3};
  std::vector<double> semi{2.0};
};

// Sample statistics of one data set. Lower/upper split at the sample mean:
// X_i <= mean counts as lower, so count_lower >= 1 always while count_upper
// can be zero (constant data), in which case the local upper moments are
// absent rather than NaN.
struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  std::map<double, double> m_raw;
  std::map<int, double> m_central;  // signed
  double variance = 0.0;            // population form, 1/n
  std::map<double, double> m_lower;
  std::map<double, double> m_upper;
  std::map<double, std::optional<double>> m_lower_local;
  std::map<double, std::optional<double>> m_upper_local;
  std::size_t count_lower = 0;
  std::size_t count_upper = 0;
};

// Two passes (mean, then deviations) with Neumaier-compensated sums in a
// fixed order, so the result does not depend on how the data was produced.
MomentSummary summarize(std::span<const double> data, const MomentOrders& orders = {});
inline MomentSummary summarize(const SampleSet& data, const MomentOrders& orders = {}) {
  return summarize(data.view(), orders);
}

namespace limit {

// log M_{n,h1} / log M_{n,h2}; needs h1, h2 > alpha.
struct MomentRatio {
  double h1;
  double h2;
};
// log |M^c_{n,k}| / log M_{n,1}; alpha in (0, 1).
struct CentralVsMean {
  int k;
};
// log |M^c_{n,h1}| / log |M^c_{n,h2}|.
struct CentralVsCentral {
  int h1;
  int h2;
};
// log V_n / log M_{n,1}; alpha in (0, 1).
struct Variance {};
// log M^+_{n,h} / log M_{n,1}; h > 1, alpha in (0, 1).
struct UpperCentralVsMean {
  double h;
};
// log M^{+*}_{n,h} / log M_{n,1}; h > 1, alpha in (0, 1).
struct LocalUpperVsMean {
  double h;
};
// log M^-_{n,h} / log M_{n,1}; alpha in (0, 1).
struct LowerVsMean {
  double h;
};

}  // namespace limit

using LimitKind = std::variant<limit::MomentRatio, limit::CentralVsMean, limit::CentralVsCentral,
                               limit::Variance, limit::UpperCentralVsMean,
                               limit::LocalUpperVsMean, limit::LowerVsMean>;

struct LimitSpec {
  LimitKind kind;
  double alpha;
};

std::string describe(const LimitKind& kind);

// The orders summarize() must compute for taylor_ratio(kind) to succeed.
MomentOrders orders_for(const LimitKind& kind);

// (h - alpha) / (k - alpha).
double iota(double h, double k, double alpha);
// (h - alpha^2) / (1 - alpha).
double iota_plus(double h, double alpha);

// Log-ratio of the statistics named by kind. Nonpositive statistics throw
// DomainError, an absent local statistic throws DomainError, and a
// denominator log below 1e-12 in magnitude throws IllConditionedError.
double taylor_ratio(const MomentSummary& summary, const LimitKind& kind);

// Limit in probability of taylor_ratio; RegimeError outside the tail-index
// range where that limit is established.
double theoretical_limit(const LimitSpec& spec);

// Tail index solving ratio = (2 - alpha) / (1 - alpha).
double implied_alpha(double variance_ratio);

}  // namespace taylorlaw

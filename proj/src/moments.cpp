#include "taylorlaw/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "taylorlaw/error.hpp"
#include "taylorlaw/numerics.hpp"

namespace taylorlaw {
namespace {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double positive_log(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite for a log-ratio, got " << value;
    throw DomainError(msg.str());
  }
  return std::log(value);
}

double log_ratio(double num, const char* num_name, double den, const char* den_name) {
  const double log_num = positive_log(num, num_name);
  const double log_den = positive_log(den, den_name);
  if (std::abs(log_den) < 1e-12) {
    throw IllConditionedError(std::string("log of ") + den_name + " is numerically zero");
  }
  return log_num / log_den;
}

template <typename Map, typename Key>
auto lookup(const Map& map, Key key, const char* what) {
  const auto it = map.find(key);
  if (it == map.end()) {
    std::ostringstream msg;
    msg << what << " of order " << key << " was not computed";
    throw ParameterError(msg.str());
  }
  return it->second;
}

void require_regime(bool ok, const char* result, double alpha) {
  if (!ok) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " is outside the regime of the " << result;
    throw RegimeError(msg.str());
  }
}

}  // namespace

MomentSummary summarize(std::span<const double> data, const MomentOrders& orders) {
  if (data.empty()) throw DomainError("cannot summarize an empty sample");
  auto raw = orders.raw;
  raw.push_back(1.0);
  raw = sorted_unique(std::move(raw));
  const auto central = sorted_unique(orders.central);
  const auto semi = sorted_unique(orders.semi);
  for (const double p : raw) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("raw moment orders must be positive");
  }
  for (const int k : central) {
    if (k < 2) throw ParameterError("central moment orders must be at least 2");
  }
  for (const double h : semi) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("semi-moment orders must be positive");
  }
  const bool fractional_raw =
      std::any_of(raw.begin(), raw.end(), [](double p) { return !is_small_integer(p); });

  const std::size_t n = data.size();
  std::vector<CompensatedSum> raw_sums(raw.size());
  for (const double x : data) {
    if (!std::isfinite(x)) throw DomainError("sample contains a non-finite value");
    if (fractional_raw && x < 0.0) {
      throw DomainError("fractional raw moments need nonnegative data");
    }
    for (std::size_t j = 0; j < raw.size(); ++j) raw_sums[j].add(power(x, raw[j]));
  }
  const double nd = static_cast<double>(n);

  MomentSummary out;
  out.n = n;
  for (std::size_t j = 0; j < raw.size(); ++j) out.m_raw[raw[j]] = raw_sums[j].value() / nd;
  const double mean = out.m_raw.at(1.0);
  out.mean = mean;

  const int max_k = std::max(2, central.empty() ? 2 : central.back());
  std::vector<CompensatedSum> central_sums(static_cast<std::size_t>(max_k + 1));
  std::vector<CompensatedSum> lower_sums(semi.size()), upper_sums(semi.size());
  std::size_t count_lower = 0;
  for (const double x : data) {
    const double d = x - mean;
    double dk = d;
    for (int k = 2; k <= max_k; ++k) {
      dk *= d;
      central_sums[static_cast<std::size_t>(k)].add(dk);
    }
    const bool lower = x <= mean;
    count_lower += lower ? 1 : 0;
    auto& sums = lower ? lower_sums : upper_sums;
    const double dev = std::abs(d);
    for (std::size_t j = 0; j < semi.size(); ++j) sums[j].add(power(dev, semi[j]));
  }

  out.variance = central_sums[2].value() / nd;
  for (const int k : central) out.m_central[k] = central_sums[static_cast<std::size_t>(k)].value() / nd;
  out.count_lower = count_lower;
  out.count_upper = n - count_lower;
  for (std::size_t j = 0; j < semi.size(); ++j) {
    const double h = semi[j];
    const double lo = lower_sums[j].value();
    const double hi = upper_sums[j].value();
    out.m_lower[h] = lo / nd;
    out.m_upper[h] = hi / nd;
    out.m_lower_local[h] = lo / static_cast<double>(out.count_lower);
    out.m_upper_local[h] =
        out.count_upper > 0 ? std::optional<double>(hi / static_cast<double>(out.count_upper)) : std::nullopt;
  }
  return out;
}

std::string describe(const LimitKind& kind) {
  std::ostringstream s;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::MomentRatio>) {
          s << "moment_ratio(" << k.h1 << "," << k.h2 << ")";
        } else if constexpr (std::is_same_v<K, limit::CentralVsMean>) {
          s << "central_vs_mean(" << k.k << ")";
        } else if constexpr (std::is_same_v<K, limit::CentralVsCentral>) {
          s << "central_vs_central(" << k.h1 << "," << k.h2 << ")";
        } else if constexpr (std::is_same_v<K, limit::Variance>) {
          s << "variance";
        } else if constexpr (std::is_same_v<K, limit::UpperCentralVsMean>) {
          s << "upper_vs_mean(" << k.h << ")";
        } else if constexpr (std::is_same_v<K, limit::LocalUpperVsMean>) {
          s << "local_upper_vs_mean(" << k.h << ")";
        } else {
          s << "lower_vs_mean(" << k.h << ")";
        }
      },
      kind);
  return s.str();
}

MomentOrders orders_for(const LimitKind& kind) {
  MomentOrders orders{{1.0}, {2}, {}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::MomentRatio>) {
          orders.raw = {1.0, k.h1, k.h2};
        } else if constexpr (std::is_same_v<K, limit::CentralVsMean>) {
          orders.central = {2, k.k};
        } else if constexpr (std::is_same_v<K, limit::CentralVsCentral>) {
          orders.central = {2, k.h1, k.h2};
        } else if constexpr (std::is_same_v<K, limit::Variance>) {
        } else {
          orders.semi = {k.h};
        }
      },
      kind);
  return orders;
}

double iota(double h, double k, double alpha) {
  if (k == alpha) throw RegimeError("iota(h, k) is singular at k = alpha");
  return (h - alpha) / (k - alpha);
}

double iota_plus(double h, double alpha) {
  if (alpha == 1.0) throw RegimeError("iota_plus(h) is singular at alpha = 1");
  return (h - alpha * alpha) / (1.0 - alpha);
}

double taylor_ratio(const MomentSummary& s, const LimitKind& kind) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        const double mean = s.mean;
        if constexpr (std::is_same_v<K, limit::MomentRatio>) {
          return log_ratio(lookup(s.m_raw, k.h1, "raw moment"), "M_{n,h1}",
                           lookup(s.m_raw, k.h2, "raw moment"), "M_{n,h2}");
        } else if constexpr (std::is_same_v<K, limit::CentralVsMean>) {
          return log_ratio(std::abs(lookup(s.m_central, k.k, "central moment")), "|M^c_{n,k}|", mean,
                           "M_{n,1}");
        } else if constexpr (std::is_same_v<K, limit::CentralVsCentral>) {
          return log_ratio(std::abs(lookup(s.m_central, k.h1, "central moment")), "|M^c_{n,h1}|",
                           std::abs(lookup(s.m_central, k.h2, "central moment")), "|M^c_{n,h2}|");
        } else if constexpr (std::is_same_v<K, limit::Variance>) {
          return log_ratio(s.variance, "V_n", mean, "M_{n,1}");
        } else if constexpr (std::is_same_v<K, limit::UpperCentralVsMean>) {
          return log_ratio(lookup(s.m_upper, k.h, "upper moment"), "M^+_{n,h}", mean, "M_{n,1}");
        } else if constexpr (std::is_same_v<K, limit::LocalUpperVsMean>) {
          const auto local = lookup(s.m_upper_local, k.h, "local upper moment");
          if (!local) throw DomainError("local upper moment undefined: no value exceeds the mean");
          return log_ratio(*local, "M^{+*}_{n,h}", mean, "M_{n,1}");
        } else {
          return log_ratio(lookup(s.m_lower, k.h, "lower moment"), "M^-_{n,h}", mean, "M_{n,1}");
        }
      },
      kind);
}

double theoretical_limit(const LimitSpec& spec) {
  const double a = spec.alpha;
  if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("alpha must be positive");
  const bool unit = a < 1.0;
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, limit::MomentRatio>) {
          require_regime(k.h1 > a && k.h2 > a, "higher-moment limit (needs h1, h2 > alpha)", a);
          return iota(k.h1, k.h2, a);
        } else if constexpr (std::is_same_v<K, limit::CentralVsMean>) {
          require_regime(unit, "central-moment-vs-mean limit (needs alpha < 1)", a);
          return iota(k.k, 1.0, a);
        } else if constexpr (std::is_same_v<K, limit::CentralVsCentral>) {
          require_regime(k.h1 > a && k.h2 > a,
                         "central-moment ratio limit (needs integer orders > alpha)", a);
          return iota(k.h1, k.h2, a);
        } else if constexpr (std::is_same_v<K, limit::Variance>) {
          require_regime(unit, "variance-to-mean limit (needs alpha < 1)", a);
          return iota(2.0, 1.0, a);
        } else if constexpr (std::is_same_v<K, limit::UpperCentralVsMean>) {
          require_regime(unit && k.h > 1.0, "upper central moment limit (needs alpha < 1 < h)", a);
          return iota(k.h, 1.0, a);
        } else if constexpr (std::is_same_v<K, limit::LocalUpperVsMean>) {
          require_regime(unit && k.h > 1.0, "local upper central moment limit (needs alpha < 1 < h)", a);
          return iota_plus(k.h, a);
        } else {
          require_regime(unit && k.h > 0.0, "lower central moment limit (needs alpha < 1)", a);
          return k.h;
        }
      },
      spec.kind);
}

double implied_alpha(double ratio) {
  if (!std::isfinite(ratio)) throw DomainError("ratio must be finite");
  if (ratio == 1.0) throw DomainError("implied alpha is singular at ratio = 1");
  return (2.0 - ratio) / (1.0 - ratio);
}

}  // namespace taylorlaw

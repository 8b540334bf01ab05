#include "taylorlaw/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "taylorlaw/error.hpp"
#include "taylorlaw/network.hpp"

namespace taylorlaw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_f1_shaped(const TailModel& model) {
  if (!std::holds_alternative<slowly_varying::LogTimesE>(model.slowly_varying())) return false;
  if (!(model.alpha() > F1Sampler::kProposalOffset)) return false;
  const double expected = std::exp(1.0 / model.alpha());
  return std::abs(model.x_min() - expected) <= 1e-12 * expected;
}

// Draws from a TailModel, building the F1 sampler once per sequence.
class ModelSampler {
 public:
  explicit ModelSampler(const TailModel& model) : model_(model) {
    if (is_f1_shaped(model)) f1_.emplace(model.alpha());
  }

  double operator()(Rng& rng) const {
    if (f1_) return (*f1_)(rng);
    if (std::holds_alternative<slowly_varying::Constant>(model_.slowly_varying())) {
      return pareto_from_uniform(model_.x_min(), model_.alpha(), rng.uniform());
    }
    return model_.inverse_survival(rng.uniform_open());
  }

 private:
  const TailModel& model_;
  std::optional<F1Sampler> f1_;
};

void require_count(std::size_t n) {
  if (n == 0) throw ParameterError("sample size n must be at least 1");
}

}  // namespace

double process::NetworkRule::mean_degree_for(std::size_t n) const {
  if (staged) return n < 1000 ? 10.0 : 100.0;
  return mean_degree;
}

std::optional<std::size_t> process::NetworkRule::cap_for(std::size_t n) const {
  if (staged) return n < 1000 ? std::size_t{20} : std::size_t{200};
  return degree_cap;
}

double draw(const TailModel& model, Rng& rng) { return ModelSampler(model)(rng); }

void ProcessSpec::validate() const {
  std::visit(
      Overloaded{
          [](const process::Iid&) {},
          [](const process::Stable& s) {
            if (!(s.c > 0.0)) throw ParameterError("stable scale c must be positive");
            if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
              throw ParameterError("one-sided stable needs alpha in (0, 1)");
            }
          },
          [](const process::Ar1& a) {
            if (!(a.beta1 > 0.0 && a.beta1 < 1.0)) {
              throw ParameterError("AR(1) coefficient beta1 must lie in (0, 1)");
            }
          },
          [](const process::Equicorrelated& e) {
            if (!(e.alpha > 0.0)) throw ParameterError("alpha must be positive");
            if (!(e.rho >= 0.0 && e.rho < 1.0)) throw ParameterError("rho must lie in [0, 1)");
          },
          [](const process::GaussianModulated& g) {
            if (!(g.alpha > 0.0)) throw ParameterError("alpha must be positive");
            if (!(g.decay_length > 0.0)) throw ParameterError("decay_length must be positive");
          },
          [](const process::Heterogeneous& h) {
            if (!(h.p_star > 0.0 && h.p_star <= 1.0)) {
              throw ParameterError("p_star must lie in (0, 1]");
            }
            if (!(h.model_u.alpha() <= h.model_v.alpha())) {
              throw ParameterError("heterogeneous mixture needs model_u to have the smaller (or equal) tail index");
            }
          },
          [](const process::Network& n) {
            if (!n.graph.staged && !(n.graph.mean_degree >= 0.0)) {
              throw ParameterError("mean degree must be nonnegative");
            }
          },
      },
      kind);
}

std::string ProcessSpec::name() const {
  return std::visit(Overloaded{
                        [](const process::Iid&) { return "iid"; },
                        [](const process::Stable&) { return "stable"; },
                        [](const process::Ar1&) { return "ar1"; },
                        [](const process::Equicorrelated&) { return "equicorrelated"; },
                        [](const process::GaussianModulated&) { return "gaussian-modulated"; },
                        [](const process::Heterogeneous&) { return "heterogeneous"; },
                        [](const process::Network&) { return "network"; },
                    },
                    kind);
}

std::string ProcessSpec::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const process::Iid& p) { out << "iid " << p.model.describe(); },
                 [&](const process::Stable& p) { out << "stable(c=" << p.c << ", alpha=" << p.alpha << ")"; },
                 [&](const process::Ar1& p) {
                   out << "ar1(beta1=" << p.beta1 << ", burn_in=" << p.burn_in
                       << ", noise=" << p.noise.describe() << ")";
                 },
                 [&](const process::Equicorrelated& p) {
                   out << "equicorrelated(alpha=" << p.alpha << ", rho=" << p.rho << ")";
                 },
                 [&](const process::GaussianModulated& p) {
                   out << "gaussian-modulated(alpha=" << p.alpha << ", decay_length=" << p.decay_length << ")";
                 },
                 [&](const process::Heterogeneous& p) {
                   out << "heterogeneous(p_star=" << p.p_star << ", U=" << p.model_u.describe()
                       << ", V=" << p.model_v.describe() << ")";
                 },
                 [&](const process::Network& p) {
                   out << "network(";
                   if (p.graph.staged) {
                     out << "staged";
                   } else {
                     out << "mean_degree=" << p.graph.mean_degree;
                     if (p.graph.degree_cap) out << ", cap=" << *p.graph.degree_cap;
                   }
                   out << ", Z=" << p.z_model.describe() << ")";
                 },
             },
             kind);
  return out.str();
}

double pareto_from_uniform(double x_min, double alpha, double u) {
  return x_min * std::pow(1.0 - u, -1.0 / alpha);
}

double stable_from_uniforms(double c, double alpha, double angle, double exponential) {
  const double log_x = std::log(std::sin(alpha * angle)) - std::log(std::sin(angle)) / alpha +
                       (1.0 - alpha) / alpha *
                           (std::log(std::sin((1.0 - alpha) * angle)) - std::log(exponential));
  return c * std::exp(log_x);
}

F1Sampler::F1Sampler(double alpha) : alpha_(alpha) {
  if (!(alpha > kProposalOffset) || !std::isfinite(alpha)) {
    throw ParameterError("F1 sampler needs alpha > 0.05 so the proposal index is positive");
  }
  x_min_ = std::exp(1.0 / alpha_);
  proposal_alpha_ = alpha_ - kProposalOffset;
  // (alpha y - 1) exp(-0.05 y) in y = log x peaks where alpha y - 1 = alpha / 0.05.
  const double peak_log_x = (1.0 + alpha_ / kProposalOffset) / alpha_;
  ratio_sup_ = density_ratio(std::exp(peak_log_x));
  envelope_ = kSafetyFactor * ratio_sup_;
}

double F1Sampler::cdf(double x) const {
  if (x <= x_min_) return 0.0;
  return 1.0 - std::exp(-alpha_ * std::log(x)) * std::log(x) * std::numbers::e * alpha_;
}

double F1Sampler::density(double x) const {
  if (x < x_min_) return 0.0;
  const double log_x = std::log(x);
  return std::numbers::e * alpha_ * std::exp((-alpha_ - 1.0) * log_x) * (alpha_ * log_x - 1.0);
}

double F1Sampler::proposal_density(double x) const {
  if (x < x_min_) return 0.0;
  return proposal_alpha_ * std::exp(proposal_alpha_ * std::log(x_min_) -
                                    (proposal_alpha_ + 1.0) * std::log(x));
}

double F1Sampler::density_ratio(double x) const {
  if (x < x_min_) return 0.0;
  const double log_x = std::log(x);
  return std::numbers::e * alpha_ * (alpha_ * log_x - 1.0) *
         std::exp(-kProposalOffset * log_x - proposal_alpha_ / alpha_) / proposal_alpha_;
}

double F1Sampler::operator()(Rng& rng) const {
  for (;;) {
    const double x = pareto_from_uniform(x_min_, proposal_alpha_, rng.uniform());
    const double ratio = density_ratio(x);
    if (ratio > envelope_) {
      throw Error("F1 sampler: density ratio exceeded the acceptance-rejection envelope");
    }
    if (rng.uniform() * envelope_ <= ratio) return x;
  }
}

SampleSet sample_pareto(double x_min, double alpha, std::size_t n, std::uint64_t seed,
                        std::uint64_t replicate_id) {
  if (!(x_min > 0.0) || !(alpha > 0.0)) {
    throw ParameterError("Pareto needs positive x_min and alpha");
  }
  require_count(n);
  return sample_process(ProcessSpec{process::Iid{TailModel::pareto(x_min, alpha)}}, n, seed,
                        replicate_id);
}

SampleSet sample_stable_one_sided(double c, double alpha, std::size_t n, std::uint64_t seed,
                                  std::uint64_t replicate_id) {
  return sample_process(ProcessSpec{process::Stable{c, alpha}}, n, seed, replicate_id);
}

SampleSet sample_f1(double alpha, std::size_t n, std::uint64_t seed,
                    std::uint64_t replicate_id) {
  if (!(alpha > F1Sampler::kProposalOffset)) {
    throw ParameterError("F1 sampler needs alpha > 0.05 so the proposal index is positive");
  }
  return sample_process(ProcessSpec{process::Iid{TailModel::f1(alpha)}}, n, seed, replicate_id);
}

std::vector<double> ar1_recursion(double beta1, std::span<const double> noise,
                                  std::size_t burn_in, double x0) {
  if (noise.size() < burn_in) throw ParameterError("noise shorter than burn-in");
  std::vector<double> out;
  out.reserve(noise.size() - burn_in);
  double x = x0;
  for (std::size_t t = 0; t < noise.size(); ++t) {
    x = beta1 * x + noise[t];
    if (t >= burn_in) out.push_back(x);
  }
  return out;
}

std::vector<double> gaussian_ar1(std::size_t n, double decay_length, Rng& rng) {
  if (!(decay_length > 0.0)) throw ParameterError("decay_length must be positive");
  const double phi = std::exp(-1.0 / decay_length);
  const double innovation_sd = std::sqrt(-std::expm1(-2.0 / decay_length));
  std::vector<double> g(n);
  double current = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) current = phi * current + innovation_sd * rng.normal();
    g[i] = current;
  }
  return g;
}

SampleSet sample_process(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t replicate_id) {
  require_count(n);
  spec.validate();
  Rng rng(seed, StreamTag::kSample, replicate_id);
  SampleSet out;
  out.spec = spec;
  out.seed = seed;
  out.replicate_id = replicate_id;
  auto& values = out.values;
  values.resize(n);

  std::visit(
      Overloaded{
          [&](const process::Iid& p) {
            ModelSampler sampler(p.model);
            for (auto& v : values) v = sampler(rng);
          },
          [&](const process::Stable& p) {
            for (auto& v : values) {
              const double angle = std::numbers::pi * rng.uniform_open();
              v = stable_from_uniforms(p.c, p.alpha, angle, rng.exponential());
            }
          },
          [&](const process::Ar1& p) {
            ModelSampler sampler(p.noise);
            double x = 0.0;
            for (std::size_t t = 0; t < p.burn_in; ++t) x = p.beta1 * x + sampler(rng);
            for (auto& v : values) {
              x = p.beta1 * x + sampler(rng);
              v = x;
            }
          },
          [&](const process::Equicorrelated& p) {
            const double common = std::sqrt(p.rho) * rng.normal();
            const double idiosyncratic = std::sqrt(1.0 - p.rho);
            const double exponent = -1.0 / (2.0 * p.alpha);
            for (auto& v : values) {
              const double z = common + idiosyncratic * rng.normal();
              v = std::pow(z * z, exponent);
            }
          },
          [&](const process::GaussianModulated& p) {
            const auto g = gaussian_ar1(n, p.decay_length, rng);
            for (std::size_t i = 0; i < n; ++i) {
              values[i] = pareto_from_uniform(1.0, p.alpha, rng.uniform()) * std::exp(g[i]);
            }
          },
          [&](const process::Heterogeneous& p) {
            std::size_t u_count = 0;
            for (std::size_t i = 0; i < n; ++i) u_count += rng.uniform() < p.p_star ? 1 : 0;
            ModelSampler sample_u(p.model_u);
            ModelSampler sample_v(p.model_v);
            for (std::size_t i = 0; i < n; ++i) {
              values[i] = i < u_count ? sample_u(rng) : sample_v(rng);
            }
            for (std::size_t i = n; i > 1; --i) {
              std::swap(values[i - 1], values[rng.below(i)]);
            }
          },
          [&](const process::Network& p) {
            const double mean_degree = p.graph.mean_degree_for(n);
            const double edge_p = n > 1 ? std::min(1.0, mean_degree / static_cast<double>(n - 1)) : 0.0;
            const auto graph = gen_erdos_renyi(n, edge_p, p.graph.cap_for(n),
                                               derive_seed(seed, replicate_id));
            auto node_values = assign_node_values(graph.graph, p.z_model, seed, replicate_id);
            values = std::move(node_values.x);
          },
      },
      spec.kind);
  return out;
}

}  // namespace taylorlaw

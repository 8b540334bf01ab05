#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "taylorlaw/rng.hpp"
#include "taylorlaw/tail_model.hpp"

namespace taylorlaw {

// Recipes for dependent and heterogeneous sequences.
namespace process {

struct Iid {
  TailModel model;
};

// Totally skewed one-sided stable law with Laplace transform exp(-(c s)^alpha).
struct Stable {
  double c = 1.0;
  double alpha = 0.5;
};

// X_t = beta1 X_{t-1} + eps_t started at X_0 = 0 and run burn_in steps
// before the first emitted value.
struct Ar1 {
  double beta1;
  TailModel noise;
  std::size_t burn_in = 10'000;
};

// Z_i = sqrt(rho) N_0 + sqrt(1 - rho) N_i, X_i = (Z_i^2)^{-1/(2 alpha)}.
struct Equicorrelated {
  double alpha;
  double rho;
};

// X_i = Z_i exp(G_i) with Z_i ~ Pareto(1, alpha) and G a stationary Gaussian
// sequence with Corr(G_i, G_j) = exp(-|i - j| / decay_length).
struct GaussianModulated {
  double alpha;
  double decay_length;
};

// u_n ~ Binomial(n, p_star) draws from model_u, the rest from model_v, in a
// seeded random order. model_u must carry the heavier tail.
struct Heterogeneous {
  double p_star;
  TailModel model_u;
  TailModel model_v;
};

// Erdos-Renyi graph on n nodes with edge probability mean_degree / (n - 1),
// optionally capped in degree, carrying propagated node values.
struct NetworkRule {
  double mean_degree = 10.0;
  std::optional<std::size_t> degree_cap;
  // Use mean degree 10 / cap 20 below 1000 nodes and 100 / 200 from 1000 on,
  // ignoring the two fields above.
  bool staged = false;

  double mean_degree_for(std::size_t n) const;
  std::optional<std::size_t> cap_for(std::size_t n) const;
};

struct Network {
  NetworkRule graph;
  TailModel z_model;
};

}  // namespace process

using ProcessKind =
    std::variant<process::Iid, process::Stable, process::Ar1, process::Equicorrelated,
                 process::GaussianModulated, process::Heterogeneous, process::Network>;

struct ProcessSpec {
  ProcessKind kind;

  // Throws ParameterError on an invalid recipe.
  void validate() const;
  std::string name() const;
  std::string describe() const;
};

struct SampleSet {
  std::vector<double> values;
  std::optional<ProcessSpec> spec;  // absent for ingested data
  std::uint64_t seed = 0;
  std::uint64_t replicate_id = 0;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

// Inverse CDF of Pareto(x_min, alpha) at u in [0, 1).
double pareto_from_uniform(double x_min, double alpha, double u);

// Kanter's representation of the positive stable law with Laplace transform
// exp(-(c s)^alpha), from U uniform on (0, pi) and W unit exponential.
double stable_from_uniforms(double c, double alpha, double angle, double exponential);

// Acceptance-rejection sampler for F_{1,alpha} using the proposal
// Pareto(exp(1/alpha), alpha - 0.05).
class F1Sampler {
 public:
  static constexpr double kProposalOffset = 0.05;
  static constexpr double kSafetyFactor = 1.05;

  explicit F1Sampler(double alpha);

  double alpha() const noexcept { return alpha_; }
  double support_min() const noexcept { return x_min_; }
  double proposal_alpha() const noexcept { return proposal_alpha_; }
  // sup_x target_density(x) / proposal_density(x), computed in closed form.
  double density_ratio_sup() const noexcept { return ratio_sup_; }
  double envelope() const noexcept { return envelope_; }

  double cdf(double x) const;
  double density(double x) const;
  double proposal_density(double x) const;
  double density_ratio(double x) const;

  double operator()(Rng& rng) const;

 private:
  double alpha_;
  double x_min_;
  double proposal_alpha_;
  double ratio_sup_;
  double envelope_;
};

SampleSet sample_pareto(double x_min, double alpha, std::size_t n, std::uint64_t seed,
                        std::uint64_t replicate_id = 0);
SampleSet sample_stable_one_sided(double c, double alpha, std::size_t n, std::uint64_t seed,
                                  std::uint64_t replicate_id = 0);
SampleSet sample_f1(double alpha, std::size_t n, std::uint64_t seed,
                    std::uint64_t replicate_id = 0);

// Deterministic in (spec, n, seed, replicate_id).
SampleSet sample_process(const ProcessSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t replicate_id = 0);

// The AR(1) recursion applied to a given noise sequence; the first burn_in
// noise values are consumed without being emitted.
std::vector<double> ar1_recursion(double beta1, std::span<const double> noise,
                                  std::size_t burn_in, double x0 = 0.0);

// The stationary Gaussian AR(1) sequence used by GaussianModulated.
std::vector<double> gaussian_ar1(std::size_t n, double decay_length, Rng& rng);

}  // namespace taylorlaw

#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "taylorlaw/analysis.hpp"
#include "taylorlaw/asymptotics.hpp"
#include "taylorlaw/distributions.hpp"
#include "taylorlaw/error.hpp"
#include "taylorlaw/io.hpp"
#include "taylorlaw/moments.hpp"
#include "taylorlaw/network.hpp"
#include "taylorlaw/numerics.hpp"
#include "taylorlaw/parallel.hpp"
#include "taylorlaw/tailfit.hpp"

namespace taylorlaw::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSeedEnv = "TAYLORLAW_SEED";

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string format;
  std::string output;
};

struct SpecOptions {
  std::string dist = "pareto";
  double alpha = 0.5;
  double x_min = 1.0;
  std::string l = "constant";
  double l_beta = 1.0;
  int l_sign = 1;
  double c = 1.0;
  double beta1 = 0.8;
  std::size_t burn_in = 10'000;
  double rho = 0.1;
  double decay = 100.0;
  double p_star = 0.6;
  double alpha_v = 0.8;
  double x_min_v = 1.0;
  double mean_degree = 10.0;
  std::size_t degree_cap = 0;
  bool staged = false;
};

struct DataSource {
  std::string input;
  std::string column;
  std::size_t n = 0;
  std::uint64_t replicate = 0;
};

// Outputs are staged and only published together once the command has
// finished; stdout output is buffered the same way.
class Outputs {
 public:
  std::ostream& open(const std::string& path) {
    if (path.empty() || path == "-") return stdout_buffer_;
    files_.push_back(std::make_unique<AtomicOutput>(path));
    paths_.push_back(path);
    return files_.back()->stream();
  }
  void commit() {
    for (auto& f : files_) f->commit();
    std::cout << stdout_buffer_.str();
    std::cout.flush();
  }
  const std::vector<std::string>& paths() const { return paths_; }

 private:
  std::ostringstream stdout_buffer_;
  std::vector<std::unique_ptr<AtomicOutput>> files_;
  std::vector<std::string> paths_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw ParameterError(std::string(what) + " is empty");
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (const double v : parse_real_list(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw ParameterError(std::string(what) + " entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// "a:b:step" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_real_list(text, "theta grid");
  std::string rest = text.substr(text.find(':') + 1);
  const auto tail = rest.find(':');
  if (tail == std::string::npos) throw ParameterError("theta grid must be start:stop:step");
  const double start = parse_real_list(text.substr(0, text.find(':')), "theta grid")[0];
  const double stop = parse_real_list(rest.substr(0, tail), "theta grid")[0];
  const double step = parse_real_list(rest.substr(tail + 1), "theta grid")[0];
  if (!(step > 0.0) || stop < start) throw ParameterError("theta grid needs step > 0 and stop >= start");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    // Round to 12 decimals so 0.5 + 45 * 0.01 prints as 0.95.
    grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return grid;
}

// Subcommands share one Common; the format default differs per command and is
// applied after parsing when the option was not given.
void add_common(CLI::App* sub, Common& common, const std::string& default_format,
                const std::string& format_flag = "--format") {
  sub->add_option("--seed", common.seed, "Master seed (env " + std::string(kSeedEnv) + " overrides the config file)");
  sub->add_option("--threads", common.threads, "Worker threads, 0 = all cores (results do not depend on it)");
  sub->add_option(format_flag, common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_str(default_format);
  sub->add_option("-o,--output", common.output, "Output path (default stdout)");
}

void add_spec_options(CLI::App* sub, SpecOptions& o) {
  sub->add_option("--dist,--process", o.dist, "Process kind")
      ->check(CLI::IsMember({"pareto", "f1", "tail", "stable", "ar1", "equicorrelated", "gaussmod", "hetero", "network"}));
  sub->add_option("--alpha", o.alpha, "Tail index");
  sub->add_option("--xmin", o.x_min, "Support lower bound");
  sub->add_option("--l", o.l, "Slowly varying factor for --dist tail/ar1/hetero/network")
      ->check(CLI::IsMember({"constant", "logtimese", "powlog", "explog"}));
  sub->add_option("--l-beta", o.l_beta, "Exponent of powlog / explog");
  sub->add_option("--l-sign", o.l_sign, "Sign of explog (+1 or -1)");
  sub->add_option("--c", o.c, "Scale of the one-sided stable law");
  sub->add_option("--beta1", o.beta1, "AR(1) coefficient");
  sub->add_option("--burn-in", o.burn_in, "AR(1) burn-in length");
  sub->add_option("--rho", o.rho, "Equicorrelation");
  sub->add_option("--decay", o.decay, "Correlation length of the Gaussian modulation");
  sub->add_option("--pstar", o.p_star, "Mixture weight of the heavier component");
  sub->add_option("--alpha-v", o.alpha_v, "Tail index of the lighter mixture component");
  sub->add_option("--xmin-v", o.x_min_v, "Support lower bound of the lighter mixture component");
  sub->add_option("--mean-degree", o.mean_degree, "Erdos-Renyi mean degree");
  sub->add_option("--degree-cap", o.degree_cap, "Maximum degree, 0 = none");
  sub->add_flag("--staged", o.staged, "Mean degree 10 / cap 20 below 1000 nodes, 100 / 200 from 1000");
}

void add_data_options(CLI::App* sub, DataSource& d) {
  sub->add_option("--input", d.input, "Sample file (otherwise simulate with the process options)");
  sub->add_option("--column", d.column, "Column of --input to read");
  sub->add_option("--n", d.n, "Sample size when simulating");
  sub->add_option("--replicate", d.replicate, "Replicate id when simulating");
}

TailModel base_model(const SpecOptions& o) {
  if (o.dist == "f1") return TailModel::f1(o.alpha);
  SlowlyVarying l = slowly_varying::Constant{1.0};
  if (o.l == "logtimese") l = slowly_varying::LogTimesE{};
  if (o.l == "powlog") l = slowly_varying::PowLog{o.l_beta};
  if (o.l == "explog") l = slowly_varying::ExpLogBeta{o.l_sign, o.l_beta};
  return TailModel(o.alpha, l, o.x_min);
}

ProcessSpec build_spec(const SpecOptions& o) {
  ProcessSpec spec{process::Iid{TailModel::pareto(1.0, 1.0)}};
  if (o.dist == "pareto" || o.dist == "f1" || o.dist == "tail") {
    spec.kind = process::Iid{base_model(o)};
  } else if (o.dist == "stable") {
    spec.kind = process::Stable{o.c, o.alpha};
  } else if (o.dist == "ar1") {
    spec.kind = process::Ar1{o.beta1, base_model(o), o.burn_in};
  } else if (o.dist == "equicorrelated") {
    spec.kind = process::Equicorrelated{o.alpha, o.rho};
  } else if (o.dist == "gaussmod") {
    spec.kind = process::GaussianModulated{o.alpha, o.decay};
  } else if (o.dist == "hetero") {
    spec.kind = process::Heterogeneous{o.p_star, base_model(o), TailModel::pareto(o.x_min_v, o.alpha_v)};
  } else {
    process::NetworkRule rule;
    rule.mean_degree = o.mean_degree;
    if (o.degree_cap > 0) rule.degree_cap = o.degree_cap;
    rule.staged = o.staged;
    spec.kind = process::Network{rule, base_model(o)};
  }
  spec.validate();
  return spec;
}

// The tail index that governs the Taylor limits of a recipe.
double governing_alpha(const ProcessSpec& spec) { return marginal_tail(spec).alpha(); }

SampleSet load_or_simulate(const DataSource& d, const SpecOptions& o, std::uint64_t seed) {
  if (!d.input.empty()) {
    SampleSet s;
    s.values = read_samples(d.input, d.column.empty() ? std::nullopt : std::optional<std::string>(d.column));
    if (s.values.empty()) throw DomainError("input '" + d.input + "' holds no values");
    return s;
  }
  if (d.n == 0) throw ParameterError("give --input or a sample size --n to simulate");
  return sample_process(build_spec(o), d.n, seed, d.replicate);
}

json config_json(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "threads" || name == "output" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_expected_max() == 0) {
        cfg[name] = true;
      } else if (results.size() == 1) {
        cfg[name] = results.front();
      } else {
        cfg[name] = results;
      }
    } else if (opt->get_expected_max() == 0) {
      cfg[name] = false;
    } else {
      const std::string def = opt->get_default_str();
      cfg[name] = def.empty() ? json(nullptr) : json(def);
    }
  }
  return cfg;
}

// The config as resolved, with the seed from whichever source won.
json resolved_config(const CLI::App* sub, const Common& common) {
  json cfg = config_json(sub);
  cfg["seed"] = common.seed;
  return cfg;
}

json report_header(const std::string& command, const CLI::App* sub, const Common& common) {
  json j;
  j["schema"] = "taylorlaw." + command + "/1";
  j["tool_version"] = kVersion;
  j["seed"] = common.seed;
  j["config"] = resolved_config(sub, common);
  return j;
}

void write_run_record(const std::string& command, const CLI::App* sub, const Common& common,
                      const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  // The sidecar sits next to the primary output when there is one.
  const std::string anchor = common.output.empty() || common.output == "-" ? outputs.front() : common.output;
  json record;
  record["schema"] = "taylorlaw.run/1";
  record["tool_version"] = kVersion;
  record["command"] = command;
  record["seed"] = common.seed;
  record["threads"] = thread_count();
  record["config"] = resolved_config(sub, common);
  record["outputs"] = outputs;
  AtomicOutput out(anchor + ".run.json");
  out.stream() << record.dump(2) << '\n';
  out.commit();
}

json regression_json(const TaylorRegression& r) {
  json j;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["ci95"] = {{"slope", {r.slope_ci95.low, r.slope_ci95.high}},
               {"intercept", {r.intercept_ci95.low, r.intercept_ci95.high}}};
  j["ci99"] = {{"slope", {r.slope_ci99.low, r.slope_ci99.high}},
               {"intercept", {r.intercept_ci99.low, r.intercept_ci99.high}}};
  j["r2"] = r.r2;
  j["adj_r2"] = r.adj_r2;
  j["implied_alpha"] = opt_json(r.implied_alpha);
  j["log_base"] = r.log_base;
  j["points_used"] = r.points.size();
  j["skipped"] = r.skipped;
  return j;
}

void write_points_csv(std::ostream& out, const std::vector<TaylorPoint>& points) {
  out << "size,log_mean,log_variance\n";
  for (const auto& p : points) out << p.size << ',' << fmt(p.log_mean) << ',' << fmt(p.log_variance) << '\n';
}

json summary_json(const MomentSummary& s) {
  auto map_json = [](const auto& m) {
    json arr = json::array();
    for (const auto& [order, value] : m) arr.push_back({{"order", order}, {"value", value}});
    return arr;
  };
  auto opt_map_json = [](const auto& m) {
    json arr = json::array();
    for (const auto& [order, value] : m) arr.push_back({{"order", order}, {"value", opt_json(value)}});
    return arr;
  };
  json j;
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["raw"] = map_json(s.m_raw);
  j["central"] = map_json(s.m_central);
  j["lower"] = map_json(s.m_lower);
  j["upper"] = map_json(s.m_upper);
  j["lower_local"] = opt_map_json(s.m_lower_local);
  j["upper_local"] = opt_map_json(s.m_upper_local);
  j["count_lower"] = s.count_lower;
  j["count_upper"] = s.count_upper;
  return j;
}

LimitKind parse_limit(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ParameterError("empty --limit");
  auto arg = [&](std::size_t i) {
    if (i >= parts.size()) throw ParameterError("--limit '" + text + "' is missing an order");
    return parse_real_list(parts[i], "--limit order")[0];
  };
  auto int_arg = [&](std::size_t i) {
    const double v = arg(i);
    if (v != std::floor(v)) throw ParameterError("central moment orders must be integers");
    return static_cast<int>(v);
  };
  const std::string& kind = parts[0];
  if (kind == "variance") return limit::Variance{};
  if (kind == "moment") return limit::MomentRatio{arg(1), arg(2)};
  if (kind == "central") return limit::CentralVsMean{int_arg(1)};
  if (kind == "central-ratio") return limit::CentralVsCentral{int_arg(1), int_arg(2)};
  if (kind == "upper") return limit::UpperCentralVsMean{arg(1)};
  if (kind == "local-upper") return limit::LocalUpperVsMean{arg(1)};
  if (kind == "lower") return limit::LowerVsMean{arg(1)};
  throw ParameterError("unknown --limit kind '" + kind +
                       "' (variance, moment:h1:h2, central:k, central-ratio:h1:h2, upper:h, local-upper:h, lower:h)");
}

// ---- commands -------------------------------------------------------------

struct Command {
  CLI::App* app = nullptr;
  std::function<void(Outputs&)> body;
  bool randomized = true;
};

void cmd_simulate(CLI::App* sub, const Common& c, const SpecOptions& o, const DataSource& d, Outputs& outs) {
  if (d.n == 0) throw ParameterError("simulate needs --n >= 1");
  const ProcessSpec spec = build_spec(o);
  const SampleSet sample = sample_process(spec, d.n, c.seed, d.replicate);
  auto& out = outs.open(c.output);
  if (c.format == "json") {
    json j = report_header("simulate", sub, c);
    j["spec"] = spec.describe();
    j["n"] = d.n;
    j["replicate"] = d.replicate;
    j["values"] = sample.values;
    out << j.dump() << '\n';
    return;
  }
  const Metadata meta{{"tool", std::string("taylorlaw ") + kVersion},
                      {"command", "simulate"},
                      {"spec", spec.describe()},
                      {"n", std::to_string(d.n)},
                      {"seed", std::to_string(c.seed)},
                      {"replicate", std::to_string(d.replicate)},
                      {"config", resolved_config(sub, c).dump()}};
  write_samples(out, sample.values, meta);
}

void cmd_summarize(CLI::App* sub, const Common& c, const SpecOptions& o, const DataSource& d,
                   const std::string& raw, const std::string& central, const std::string& semi, Outputs& outs) {
  const SampleSet data = load_or_simulate(d, o, c.seed);
  MomentOrders orders;
  orders.raw = parse_real_list(raw, "--raw");
  orders.central.clear();
  for (const double k : parse_real_list(central, "--central")) {
    if (k != std::floor(k)) throw ParameterError("--central orders must be integers");
    orders.central.push_back(static_cast<int>(k));
  }
  orders.semi = parse_real_list(semi, "--semi");
  const MomentSummary s = summarize(data.view(), orders);
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    out << "statistic,order,value\n";
    out << "n,," << s.n << "\nmean,," << fmt(s.mean) << "\nvariance,," << fmt(s.variance) << '\n';
    for (const auto& [p, v] : s.m_raw) out << "raw," << fmt(p) << ',' << fmt(v) << '\n';
    for (const auto& [k, v] : s.m_central) out << "central," << k << ',' << fmt(v) << '\n';
    for (const auto& [h, v] : s.m_lower) out << "lower," << fmt(h) << ',' << fmt(v) << '\n';
    for (const auto& [h, v] : s.m_upper) out << "upper," << fmt(h) << ',' << fmt(v) << '\n';
    for (const auto& [h, v] : s.m_lower_local) out << "lower_local," << fmt(h) << ',' << fmt(v) << '\n';
    for (const auto& [h, v] : s.m_upper_local) out << "upper_local," << fmt(h) << ',' << fmt(v) << '\n';
    out << "count_lower,," << s.count_lower << "\ncount_upper,," << s.count_upper << '\n';
    return;
  }
  json j = report_header("summarize", sub, c);
  j["summary"] = summary_json(s);
  out << j.dump(2) << '\n';
}

void cmd_taylor(CLI::App* sub, const Common& c, const SpecOptions& o, const DataSource& d, std::size_t min_size,
                std::size_t max_size, std::size_t count, double log_base, const std::string& points_out,
                Outputs& outs) {
  const SampleSet data = load_or_simulate(d, o, c.seed);
  const std::size_t top = max_size == 0 ? data.size() : max_size;
  if (top > data.size()) throw ParameterError("--max-size exceeds the sample size");
  const auto sizes = log_spaced_sizes(std::min(min_size, top), top, count);
  const TaylorPoints points = taylor_points(data.view(), sizes, derive_seed(c.seed, 0x7461796CULL), log_base);
  if (points.skipped > 0) {
    std::cerr << "warning: " << points.skipped << " subsample(s) with zero variance skipped\n";
  }
  const TaylorRegression reg = ols_fit(points);
  if (!points_out.empty()) write_points_csv(outs.open(points_out), reg.points);
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    write_points_csv(out, reg.points);
    return;
  }
  json j = report_header("taylor", sub, c);
  j["n"] = data.size();
  j["sizes_requested"] = sizes.size();
  j["regression"] = regression_json(reg);
  json pts = json::array();
  for (const auto& p : reg.points) pts.push_back({p.size, p.log_mean, p.log_variance});
  j["points"] = pts;
  out << j.dump(2) << '\n';
}

void cmd_hill(CLI::App* sub, const Common& c, const SpecOptions& o, const DataSource& d, const std::string& grid_text,
              std::size_t bootstrap, double level, Outputs& outs) {
  const SampleSet data = load_or_simulate(d, o, c.seed);
  const auto grid = parse_grid(grid_text);
  HillCurveOptions options;
  options.bootstrap_replicates = bootstrap;
  options.level = level;
  options.seed = derive_seed(c.seed, 0x68696C6CULL);
  const HillCurve curve = alt_hill_curve(data.view(), grid, options);
  auto& out = outs.open(c.output);
  auto ci = [&](const std::vector<std::optional<double>>& v, std::size_t i) {
    return v.empty() ? std::optional<double>() : v[i];
  };
  if (c.format == "csv") {
    out << "theta,k,hill,smoothed,ci_low,ci_high\n";
    for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
      out << fmt(curve.thetas[i]) << ',' << curve.ks[i] << ',' << fmt(curve.estimates[i]) << ','
          << fmt(curve.smoothed[i]) << ',' << fmt(ci(curve.ci_low, i)) << ',' << fmt(ci(curve.ci_high, i)) << '\n';
    }
    return;
  }
  json j = report_header("hill", sub, c);
  j["n"] = curve.n;
  j["level"] = curve.level;
  j["bootstrap_replicates"] = curve.bootstrap_replicates;
  json rows = json::array();
  for (std::size_t i = 0; i < curve.thetas.size(); ++i) {
    rows.push_back({{"theta", curve.thetas[i]},
                    {"k", curve.ks[i]},
                    {"hill", opt_json(curve.estimates[i])},
                    {"smoothed", opt_json(curve.smoothed[i])},
                    {"ci_low", opt_json(ci(curve.ci_low, i))},
                    {"ci_high", opt_json(ci(curve.ci_high, i))}});
  }
  j["curve"] = rows;
  out << j.dump(2) << '\n';
}

void cmd_fit(CLI::App* sub, const Common& c, const SpecOptions& o, const DataSource& d, const std::string& family,
             std::optional<double> threshold, std::optional<double> log_threshold, std::size_t bootstrap,
             double level, const std::string& survival_out, Outputs& outs) {
  const SampleSet data = load_or_simulate(d, o, c.seed);
  std::function<FitResult(std::span<const double>)> fitter;
  if (family == "pareto") {
    fitter = [](std::span<const double> x) { return fit_pareto_ls(x); };
  } else if (family == "gpd") {
    if (threshold && log_threshold) throw ParameterError("give only one of --threshold and --log-threshold");
    if (!threshold && !log_threshold) throw ParameterError("gpd needs --threshold or --log-threshold");
    const double u = threshold ? *threshold : std::exp(*log_threshold);
    fitter = [u](std::span<const double> x) { return fit_gpd_mle(x, u); };
  } else {
    fitter = [](std::span<const double> x) { return fit_negbinomial(x); };
  }
  const FitResult fit = fitter(data.view());
  json j = report_header("fit", sub, c);
  j["n"] = data.size();
  j["family"] = to_string(fit.family);
  j["params"] = fit.params;
  j["implied_tail_index"] = opt_json(fit.implied_tail_index);
  j["objective"] = fit.objective;
  j["iterations"] = fit.iterations;
  if (bootstrap > 0) {
    const auto statistic = [&](std::span<const double> x) {
      const FitResult r = fitter(x);
      if (fit.family == FitFamily::NegBinomial) return r.params.at("size");
      if (!r.implied_tail_index) throw DegenerateError("no tail index on this resample");
      return *r.implied_tail_index;
    };
    const auto ci = bootstrap_ci(data.view(), statistic, bootstrap, level, derive_seed(c.seed, 0x666974ULL));
    j["bootstrap"] = {{"statistic", fit.family == FitFamily::NegBinomial ? "size" : "implied_tail_index"},
                      {"level", ci.level},
                      {"low", ci.low},
                      {"high", ci.high},
                      {"replicates", ci.replicates},
                      {"failures", ci.failures}};
  } else {
    j["bootstrap"] = nullptr;
  }
  if (!survival_out.empty()) {
    auto& s = outs.open(survival_out);
    s << "value,survival,log_survival\n";
    for (const auto& p : empirical_survival(data.view())) {
      s << fmt(p.value) << ',' << fmt(p.survival) << ',' << fmt(p.log_survival) << '\n';
    }
  }
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    out << "parameter,value\n";
    for (const auto& [k, v] : fit.params) out << csv_field(k) << ',' << fmt(v) << '\n';
    out << "implied_tail_index," << fmt(fit.implied_tail_index) << "\nobjective," << fmt(fit.objective) << '\n';
    if (j["bootstrap"].is_object()) {
      out << "ci_low," << fmt(j["bootstrap"]["low"].get<double>()) << "\nci_high,"
          << fmt(j["bootstrap"]["high"].get<double>()) << '\n';
    }
    return;
  }
  out << j.dump(2) << '\n';
}

struct NetworkOptions {
  std::string mode = "decorrelation";
  std::size_t n = 1000;
  std::size_t replicates = 2000;
  std::size_t pairs = 10;
  std::string z = "exponential";
  std::string n_grid = "100,500,1000,5000,10000";
};

void cmd_network(CLI::App* sub, const Common& c, const SpecOptions& o, const NetworkOptions& nopt, Outputs& outs) {
  auto& out = outs.open(c.output);
  if (nopt.mode == "decorrelation") {
    process::NetworkRule rule;
    rule.mean_degree = o.mean_degree;
    if (o.degree_cap > 0) rule.degree_cap = o.degree_cap;
    rule.staged = o.staged;
    if (nopt.n < 2) throw ParameterError("network needs --n >= 2");
    const double p = std::min(1.0, rule.mean_degree_for(nopt.n) / static_cast<double>(nopt.n - 1));
    const auto er = gen_erdos_renyi(nopt.n, p, rule.cap_for(nopt.n), derive_seed(c.seed, 0x6772617068ULL));
    ValueLaw law = UnitExponential{};
    if (nopt.z == "pareto") law = base_model(o);
    DecorrelationOptions dopt;
    dopt.pairs_per_class = nopt.pairs;
    const auto report = verify_distance_decorrelation(er.graph, law, nopt.replicates, c.seed, dopt);
    json j = report_header("network", sub, c);
    j["mode"] = "decorrelation";
    j["graph"] = {{"nodes", er.graph.num_nodes()},
                  {"edges", er.graph.num_edges()},
                  {"max_degree", er.graph.max_degree()},
                  {"edge_probability", p},
                  {"attempts", er.attempts},
                  {"structure_hash", er.graph.structure_hash()}};
    j["replicates"] = report.replicates;
    json classes = json::array();
    for (const auto& cls : report.classes) {
      json pairs = json::array();
      for (const auto& pc : cls.pairs) {
        pairs.push_back({{"i", pc.i},
                         {"j", pc.j},
                         {"covariance", pc.covariance},
                         {"standard_error", pc.standard_error},
                         {"analytic", pc.analytic}});
      }
      classes.push_back({{"distance", cls.distance},
                         {"present", cls.present},
                         {"pass", cls.pass ? json(*cls.pass) : json(nullptr)},
                         {"pairs", pairs}});
    }
    j["classes"] = classes;
    j["passed"] = report.passed();
    if (c.format == "csv") {
      out << "distance,i,j,covariance,standard_error,analytic\n";
      for (const auto& cls : report.classes) {
        for (const auto& pc : cls.pairs) {
          out << cls.distance << ',' << pc.i << ',' << pc.j << ',' << fmt(pc.covariance) << ','
              << fmt(pc.standard_error) << ',' << fmt(pc.analytic) << '\n';
        }
      }
      return;
    }
    out << j.dump(2) << '\n';
    return;
  }

  // Taylor's law on propagated node values over a grid of graph sizes.
  SpecOptions net = o;
  net.dist = "network";
  const ProcessSpec spec = build_spec(net);
  const auto grid = parse_count_list(nopt.n_grid, "--n-grid");
  struct Row {
    std::size_t n, replicate;
    double mean, variance, ratio;
  };
  std::vector<Row> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<Row> slot(nopt.replicates);
    parallel_for(nopt.replicates, [&](std::size_t r) {
      const auto sample = sample_process(spec, grid[g], c.seed, (static_cast<std::uint64_t>(g) << 32) | r);
      const auto s = summarize(sample.view(), MomentOrders{{1.0}, {2}, {}});
      double ratio = std::numeric_limits<double>::quiet_NaN();
      try {
        ratio = taylor_ratio(s, limit::Variance{});
      } catch (const Error&) {
      }
      slot[r] = {grid[g], r, s.mean, s.variance, ratio};
    });
    rows.insert(rows.end(), slot.begin(), slot.end());
  }
  const double target = theoretical_limit({limit::Variance{}, governing_alpha(spec)});
  if (c.format == "csv") {
    out << "n,replicate,mean,variance,ratio\n";
    for (const auto& r : rows) {
      out << r.n << ',' << r.replicate << ',' << fmt(r.mean) << ',' << fmt(r.variance) << ','
          << (std::isfinite(r.ratio) ? fmt(r.ratio) : std::string()) << '\n';
    }
    return;
  }
  json j = report_header("network", sub, c);
  j["mode"] = "taylor";
  j["limit"] = target;
  json per_n = json::array();
  for (const std::size_t n : grid) {
    std::vector<double> ratios;
    for (const auto& r : rows) {
      if (r.n == n && std::isfinite(r.ratio)) ratios.push_back(r.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    per_n.push_back({{"n", n},
                     {"replicates", nopt.replicates},
                     {"median_ratio", ratios.empty() ? json(nullptr) : json(quantile_sorted(ratios, 0.5))}});
  }
  j["sizes"] = per_n;
  out << j.dump(2) << '\n';
}

struct IngestOptions {
  std::string path;
  std::string format = "snap";
  bool undirected = false;
  bool bipartite = false;
  std::size_t source_column = 0;
  std::size_t target_column = 1;
  std::string mode = "outdegree";
  int side = 1;
  bool filter_zero = false;
  std::string values_out;
};

void cmd_ingest(CLI::App* sub, const Common& c, const IngestOptions& opt, Outputs& outs) {
  EdgeListOptions eo;
  if (opt.format == "csv") eo.delimiter = ',';
  if (opt.format == "tsv") eo.delimiter = '\t';
  if (opt.format == "konect") eo.comment_prefix = "%";
  eo.directed = !opt.undirected;
  eo.bipartite = opt.bipartite;
  eo.source_column = opt.source_column;
  eo.target_column = opt.target_column;
  const Graph g = load_edge_list(opt.path, eo);
  ActivityOptions ao;
  ao.mode = opt.mode == "outdegree" ? ActivityMode::OutDegree
                                    : (opt.mode == "side" ? ActivityMode::SideDegree : ActivityMode::Degree);
  ao.side = opt.side;
  ao.drop_zeros = opt.filter_zero;
  const SampleSet activity = node_activity(g, ao);
  if (activity.values.empty()) throw DomainError("no node activity left after filtering");
  const MomentSummary s = summarize(activity.view(), MomentOrders{{1.0}, {2}, {}});
  const auto [lo, hi] = std::minmax_element(activity.values.begin(), activity.values.end());
  const double nd = static_cast<double>(s.n);
  if (!opt.values_out.empty()) {
    write_samples(outs.open(opt.values_out), activity.values,
                  {{"tool", std::string("taylorlaw ") + kVersion}, {"command", "ingest"}, {"source", opt.path}});
  }
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    out << "nodes,edges,n,min,max,mean,variance\n"
        << g.num_nodes() << ',' << g.num_edges() << ',' << s.n << ',' << fmt(*lo) << ',' << fmt(*hi) << ','
        << fmt(s.mean) << ',' << fmt(s.variance) << '\n';
    return;
  }
  json j = report_header("ingest", sub, c);
  j["graph"] = {{"nodes", g.num_nodes()},
                {"edges", g.num_edges()},
                {"directed", g.directed()},
                {"bipartite", g.bipartite()},
                {"structure_hash", g.structure_hash()}};
  j["n"] = s.n;
  j["min"] = *lo;
  j["max"] = *hi;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["sample_variance"] = s.n > 1 ? s.variance * nd / (nd - 1.0) : 0.0;
  out << j.dump(2) << '\n';
}

void cmd_probe(CLI::App* sub, const Common& c, const SpecOptions& o, double p, const std::string& n_grid,
               std::size_t replicates, const std::string& c_rule, Outputs& outs) {
  const ProcessSpec spec = build_spec(o);
  ProbeOptions options;
  options.c_rule = parse_c_rule(c_rule);
  const auto report = condition_a_probe(spec, p, parse_count_list(n_grid, "--n-grid"), replicates, c.seed, options);
  std::cerr << "verdict: " << to_string(report.verdict) << '\n';
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    out << "n,c_n,v_n,covariance_sum,standard_error,ratio,ratio_se,verdict\n";
    for (const auto& pt : report.points) {
      out << pt.n << ',' << fmt(pt.c_n) << ',' << fmt(pt.v_n) << ',' << fmt(pt.covariance_sum) << ','
          << fmt(pt.standard_error) << ',' << fmt(pt.ratio) << ',' << fmt(pt.ratio_se) << ','
          << to_string(report.verdict) << '\n';
    }
    return;
  }
  json j = report_header("probe", sub, c);
  j["p"] = report.p;
  j["replicates"] = report.replicates;
  j["groups"] = report.groups;
  json pts = json::array();
  for (const auto& pt : report.points) {
    pts.push_back({{"n", pt.n},
                   {"c_n", pt.c_n},
                   {"v_n", pt.v_n},
                   {"covariance_sum", pt.covariance_sum},
                   {"standard_error", pt.standard_error},
                   {"ratio", pt.ratio},
                   {"ratio_se", pt.ratio_se}});
  }
  j["points"] = pts;
  j["verdict"] = to_string(report.verdict);
  out << j.dump(2) << '\n';
}

void cmd_diagnose(CLI::App* sub, const Common& c, const SpecOptions& o, const std::string& limit_text,
                  std::optional<double> limit_alpha, const std::string& n_grid, std::size_t replicates,
                  Outputs& outs) {
  const ProcessSpec spec = build_spec(o);
  const LimitSpec limit{parse_limit(limit_text), limit_alpha.value_or(governing_alpha(spec))};
  const auto grid = parse_count_list(n_grid, "--n-grid");
  const auto rows = convergence_diagnostic(spec, limit, grid, replicates, c.seed);
  auto& out = outs.open(c.output);
  if (c.format == "csv") {
    out << "n,limit,median,q25,q75,iqr,median_abs,failures\n";
    for (const auto& r : rows) {
      out << r.n << ',' << fmt(r.limit) << ',' << fmt(r.median) << ',' << fmt(r.q25) << ',' << fmt(r.q75) << ','
          << fmt(r.iqr) << ',' << fmt(r.median_abs) << ',' << r.failures << '\n';
    }
    return;
  }
  json j = report_header("diagnose", sub, c);
  j["limit_kind"] = describe(limit.kind);
  j["alpha"] = limit.alpha;
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"limit", r.limit},
                   {"median", r.median},
                   {"q25", r.q25},
                   {"q75", r.q75},
                   {"iqr", r.iqr},
                   {"median_abs", r.median_abs},
                   {"failures", r.failures},
                   {"deviations", r.deviations}});
  }
  j["sizes"] = arr;
  out << j.dump(2) << '\n';
}

bool argv_has(int argc, char** argv, const std::string& flag) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Heavy-tailed Taylor's law toolkit: simulation, moment ratios, tail-index fits, network checks"};
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML/INI config file; [section] names match subcommands");
  app.require_subcommand(1);

  Common common;
  SpecOptions spec_opts;
  DataSource source;

  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a process recipe");
  add_common(simulate, common, "csv");
  add_spec_options(simulate, spec_opts);
  add_data_options(simulate, source);

  auto* summarize_cmd = app.add_subcommand("summarize", "Raw, central and semi moments of a sample");
  add_common(summarize_cmd, common, "json");
  add_spec_options(summarize_cmd, spec_opts);
  add_data_options(summarize_cmd, source);
  std::string raw_orders = "1,2,3", central_orders = "2,3", semi_orders = "2";
  summarize_cmd->add_option("--raw", raw_orders, "Raw moment orders");
  summarize_cmd->add_option("--central", central_orders, "Central moment orders (integers >= 2)");
  summarize_cmd->add_option("--semi", semi_orders, "Lower/upper moment orders");

  auto* taylor = app.add_subcommand("taylor", "Subsample Taylor points and fit log-variance on log-mean");
  add_common(taylor, common, "json");
  add_spec_options(taylor, spec_opts);
  add_data_options(taylor, source);
  std::size_t min_size = 500, max_size = 0, size_count = 100;
  double log_base = 10.0;
  std::string points_out;
  taylor->add_option("--min-size", min_size, "Smallest subsample size");
  taylor->add_option("--max-size", max_size, "Largest subsample size, 0 = sample size");
  taylor->add_option("--count", size_count, "Number of log-spaced sizes");
  taylor->add_option("--log-base", log_base, "Base of the logged coordinates");
  taylor->add_option("--points-out", points_out, "Also write the points CSV here");

  auto* hill_cmd = app.add_subcommand("hill", "Alternative Hill plot with smoothing and bootstrap intervals");
  add_common(hill_cmd, common, "csv");
  add_spec_options(hill_cmd, spec_opts);
  add_data_options(hill_cmd, source);
  std::string theta_grid = "0.5:0.95:0.01";
  std::size_t hill_bootstrap = 500;
  double hill_level = 0.99;
  hill_cmd->add_option("--theta-grid", theta_grid, "start:stop:step or comma list, within (0, 1]");
  hill_cmd->add_option("--bootstrap", hill_bootstrap, "Bootstrap resamples, 0 = none");
  hill_cmd->add_option("--level", hill_level, "Confidence level");

  auto* fit = app.add_subcommand("fit", "Pareto (least squares), GPD (peaks over threshold) or negative binomial fit");
  add_common(fit, common, "json");
  add_spec_options(fit, spec_opts);
  add_data_options(fit, source);
  std::string family = "pareto";
  std::optional<double> threshold, log_threshold;
  std::size_t fit_bootstrap = 0;
  double fit_level = 0.99;
  std::string survival_out;
  fit->add_option("--family", family, "Model family")->check(CLI::IsMember({"pareto", "gpd", "negbin"}));
  fit->add_option("--threshold", threshold, "GPD threshold");
  fit->add_option("--log-threshold", log_threshold, "GPD threshold as a natural log");
  fit->add_option("--bootstrap", fit_bootstrap, "Bootstrap resamples for a CI, 0 = none");
  fit->add_option("--level", fit_level, "Confidence level");
  fit->add_option("--survival-out", survival_out, "Write the empirical survival points here");

  auto* network = app.add_subcommand("network", "Erdos-Renyi decorrelation check or network Taylor ratios");
  add_common(network, common, "json");
  add_spec_options(network, spec_opts);
  NetworkOptions nopt;
  network->add_option("--mode", nopt.mode, "decorrelation or taylor")->check(CLI::IsMember({"decorrelation", "taylor"}));
  network->add_option("--n", nopt.n, "Nodes (decorrelation mode)");
  network->add_option("--replicates", nopt.replicates, "Replicates of the node values");
  network->add_option("--pairs", nopt.pairs, "Sampled pairs per distance class");
  network->add_option("--z", nopt.z, "Law of Z in decorrelation mode")->check(CLI::IsMember({"exponential", "pareto"}));
  network->add_option("--n-grid", nopt.n_grid, "Graph sizes (taylor mode)");

  auto* ingest = app.add_subcommand("ingest", "Load an edge list and summarise node activity");
  add_common(ingest, common, "json", "--report-format");
  IngestOptions iopt;
  ingest->add_option("path", iopt.path, "Edge list file")->required();
  ingest->add_option("--format", iopt.format, "snap (whitespace, # comments), konect (% comments), csv, tsv")
      ->check(CLI::IsMember({"snap", "konect", "csv", "tsv"}));
  ingest->add_flag("--undirected", iopt.undirected, "Treat edges as undirected");
  ingest->add_flag("--bipartite", iopt.bipartite, "Source and target ids live on separate sides");
  ingest->add_option("--source-column", iopt.source_column, "Zero-based source field");
  ingest->add_option("--target-column", iopt.target_column, "Zero-based target field");
  ingest->add_option("--mode", iopt.mode, "Activity measure")->check(CLI::IsMember({"outdegree", "degree", "side"}));
  ingest->add_option("--side", iopt.side, "Bipartite side for --mode side");
  ingest->add_flag("--filter-zero-outdegree,--drop-zeros", iopt.filter_zero, "Drop nodes with zero activity");
  ingest->add_option("--values-out", iopt.values_out, "Write the activity values as a sample file");

  auto* probe = app.add_subcommand("probe", "Monte Carlo probe of the truncated covariance condition");
  add_common(probe, common, "csv");
  add_spec_options(probe, spec_opts);
  double probe_p = 1.0;
  std::string probe_grid = "100,1000,10000", c_rule = "log";
  std::size_t probe_replicates = 200;
  probe->add_option("--p", probe_p, "Moment order");
  probe->add_option("--n-grid", probe_grid, "Sequence lengths");
  probe->add_option("--replicates", probe_replicates, "Replicates per length (>= 10)");
  probe->add_option("--c-rule", c_rule, "c_n sequence")->check(CLI::IsMember({"log", "loglog", "sqrtlog", "unit"}));

  auto* diagnose = app.add_subcommand("diagnose", "Deviation of Taylor ratios from their limits over n");
  add_common(diagnose, common, "csv");
  add_spec_options(diagnose, spec_opts);
  std::string limit_text = "variance", diag_grid = "1000,10000,100000,1000000";
  std::optional<double> limit_alpha;
  std::size_t diag_replicates = 20;
  diagnose->add_option("--limit", limit_text, "variance, moment:h1:h2, central:k, central-ratio:h1:h2, upper:h, local-upper:h, lower:h");
  diagnose->add_option("--limit-alpha", limit_alpha, "Tail index for the limit (default: from the process)");
  diagnose->add_option("--n-grid", diag_grid, "Sample sizes");
  diagnose->add_option("--replicates", diag_replicates, "Replicates per size");

  const char* env_seed = std::getenv(kSeedEnv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();
  try {
    if (env_seed && !argv_has(argc, argv, "--seed")) {
      try {
        std::size_t used = 0;
        common.seed = std::stoull(env_seed, &used);
        if (used != std::string(env_seed).size()) throw std::invalid_argument(env_seed);
      } catch (const std::exception&) {
        throw ParameterError(std::string(kSeedEnv) + " is not an unsigned integer: '" + env_seed + "'");
      }
    }
    if (common.format.empty()) {
      const CLI::Option* fmt_opt = active->get_option_no_throw(name == "ingest" ? "--report-format" : "--format");
      common.format = fmt_opt ? fmt_opt->get_default_str() : "json";
    }
    set_thread_count(common.threads);
    const bool randomized = name != "ingest" && !(name == "summarize" && !source.input.empty());
    if (randomized) std::cerr << "seed: " << common.seed << '\n';

    Outputs outs;
    if (name == "simulate") {
      cmd_simulate(active, common, spec_opts, source, outs);
    } else if (name == "summarize") {
      cmd_summarize(active, common, spec_opts, source, raw_orders, central_orders, semi_orders, outs);
    } else if (name == "taylor") {
      cmd_taylor(active, common, spec_opts, source, min_size, max_size, size_count, log_base, points_out, outs);
    } else if (name == "hill") {
      cmd_hill(active, common, spec_opts, source, theta_grid, hill_bootstrap, hill_level, outs);
    } else if (name == "fit") {
      cmd_fit(active, common, spec_opts, source, family, threshold, log_threshold, fit_bootstrap, fit_level,
              survival_out, outs);
    } else if (name == "network") {
      cmd_network(active, common, spec_opts, nopt, outs);
    } else if (name == "ingest") {
      cmd_ingest(active, common, iopt, outs);
    } else if (name == "probe") {
      cmd_probe(active, common, spec_opts, probe_p, probe_grid, probe_replicates, c_rule, outs);
    } else if (name == "diagnose") {
      cmd_diagnose(active, common, spec_opts, limit_text, limit_alpha, diag_grid, diag_replicates, outs);
    }
    outs.commit();
    write_run_record(name, active, common, outs.paths());
  } catch (const ParameterError& e) {
    std::cerr << "taylorlaw " << name << ": parameter error: " << e.what() << '\n';
    return 2;
  } catch (const RegimeError& e) {
    std::cerr << "taylorlaw " << name << ": parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "taylorlaw " << name << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace taylorlaw::cli

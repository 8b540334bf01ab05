#include "taylorlaw/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "taylorlaw/error.hpp"
#include "taylorlaw/parallel.hpp"

namespace taylorlaw {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (value >> (8 * byte)) & 0xFF;
    h *= kFnvPrime;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, std::optional<char> delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(*delimiter, start);
      fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Sparse row of the propagation matrix: x_i = sum_k row[k] z_k.
std::map<NodeId, double> propagation_row(const Graph& g, NodeId i) {
  std::map<NodeId, double> row{{i, 1.0}};
  const auto nbrs = g.neighbors(i);
  if (!nbrs.empty()) {
    const double weight = 1.0 / static_cast<double>(nbrs.size());
    for (const NodeId k : nbrs) row[k] += weight;
  }
  return row;
}

}  // namespace

Graph Graph::from_edges(std::size_t n_nodes, std::vector<Edge> edges, bool directed) {
  if (n_nodes > std::numeric_limits<NodeId>::max()) {
    throw ParameterError("graph too large for 32-bit node ids");
  }
  std::erase_if(edges, [](const Edge& e) { return e.from == e.to; });
  for (const auto& e : edges) {
    if (e.from >= n_nodes || e.to >= n_nodes) throw ParameterError("edge endpoint out of range");
  }
  if (!directed) {
    for (auto& e : edges) {
      if (e.from > e.to) std::swap(e.from, e.to);
    }
  }
  auto by_endpoints = [](const Edge& a, const Edge& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  };
  std::sort(edges.begin(), edges.end(), by_endpoints);
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.from == b.from && a.to == b.to; }),
              edges.end());

  Graph g;
  g.directed_ = directed;
  g.edge_count_ = edges.size();
  g.offsets_.assign(n_nodes + 1, 0);
  g.in_degrees_.assign(n_nodes, 0);
  for (const auto& e : edges) {
    ++g.offsets_[e.from + 1];
    if (directed) {
      ++g.in_degrees_[e.to];
    } else {
      ++g.offsets_[e.to + 1];
    }
  }
  for (std::size_t v = 0; v < n_nodes; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.targets_.resize(g.offsets_[n_nodes]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    g.targets_[cursor[e.from]++] = e.to;
    if (!directed) g.targets_[cursor[e.to]++] = e.from;
  }
  for (std::size_t v = 0; v < n_nodes; ++v) {
    std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
  }
  if (!directed) {
    for (std::size_t v = 0; v < n_nodes; ++v) {
      g.in_degrees_[v] = static_cast<std::uint32_t>(g.offsets_[v + 1] - g.offsets_[v]);
    }
  }
  return g;
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  if (v >= num_nodes()) throw ParameterError("node id out of range");
  return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t Graph::degree(NodeId v) const { return neighbors(v).size(); }

std::size_t Graph::in_degree(NodeId v) const {
  if (v >= num_nodes()) throw ParameterError("node id out of range");
  return in_degrees_[v];
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
    best = std::max(best, offsets_[v + 1] - offsets_[v]);
  }
  return best;
}

std::size_t Graph::side_size(int side) const {
  if (!side_sizes_) throw ParameterError("graph is not bipartite");
  if (side != 0 && side != 1) throw ParameterError("bipartite side must be 0 or 1");
  return side == 0 ? side_sizes_->first : side_sizes_->second;
}

int Graph::side_of(NodeId v) const {
  if (!side_sizes_) throw ParameterError("graph is not bipartite");
  return v < side_sizes_->first ? 0 : 1;
}

void Graph::set_bipartite_sides(std::size_t side0, std::size_t side1) {
  if (side0 + side1 != num_nodes()) throw ParameterError("bipartite sides must cover all nodes");
  for (std::size_t v = 0; v < num_nodes(); ++v) {
    for (const NodeId w : neighbors(static_cast<NodeId>(v))) {
      if ((v < side0) == (w < side0)) {
        throw ParameterError("bipartite graph has an edge within one side");
      }
    }
  }
  side_sizes_ = std::make_pair(side0, side1);
}

std::uint64_t Graph::structure_hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, directed_ ? 1 : 0);
  fnv_mix(h, num_nodes());
  fnv_mix(h, edge_count_);
  for (const auto o : offsets_) fnv_mix(h, o);
  for (const auto t : targets_) fnv_mix(h, t);
  if (side_sizes_) {
    fnv_mix(h, side_sizes_->first);
    fnv_mix(h, side_sizes_->second);
  }
  return h;
}

ErdosRenyiResult gen_erdos_renyi(std::size_t n, double p, std::optional<std::size_t> cap,
                                 std::uint64_t seed, std::size_t max_attempts) {
  if (n == 0) throw ParameterError("graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("edge probability must lie in [0, 1]");
  if (max_attempts == 0) throw ParameterError("regeneration budget must be positive");

  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(seed, StreamTag::kGraph, attempt);
    std::vector<Graph::Edge> edges;
    if (p == 1.0) {
      edges.reserve(n * (n - 1) / 2);
      for (std::size_t v = 1; v < n; ++v) {
        for (std::size_t w = 0; w < v; ++w) {
          edges.push_back({static_cast<NodeId>(v), static_cast<NodeId>(w)});
        }
      }
    } else if (p > 0.0) {
      // Batagelj and Brandes: jump over the lower triangle by geometric gaps.
      const double log_q = std::log1p(-p);
      edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n - 1) / 2 * 1.1) + 16);
      std::size_t v = 1;
      std::int64_t w = -1;
      while (v < n) {
        const double gap = std::floor(std::log1p(-rng.uniform()) / log_q);
        w += 1 + static_cast<std::int64_t>(std::min(gap, 1e18));
        while (v < n && w >= static_cast<std::int64_t>(v)) {
          w -= static_cast<std::int64_t>(v);
          ++v;
        }
        if (v < n) edges.push_back({static_cast<NodeId>(v), static_cast<NodeId>(w)});
      }
    }
    Graph g = Graph::from_edges(n, std::move(edges), false);
    if (!cap || g.max_degree() <= *cap) return {std::move(g), attempt + 1};
  }
  throw GenerationError("Erdos-Renyi generation exceeded the degree cap in all " +
                        std::to_string(max_attempts) + " attempts");
}

DistanceMap bfs_distances(const Graph& g, NodeId source, std::uint32_t cutoff) {
  if (source >= g.num_nodes()) throw ParameterError("BFS source out of range");
  DistanceMap dist{{source, 0}};
  std::deque<NodeId> frontier{source};
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    const std::uint32_t d = dist[v];
    if (d >= cutoff) continue;
    for (const NodeId w : g.neighbors(v)) {
      if (dist.emplace(w, d + 1).second) frontier.push_back(w);
    }
  }
  return dist;
}

NodeValues propagate(const Graph& g, std::vector<double> z) {
  if (g.directed()) throw ParameterError("value propagation needs an undirected graph");
  if (z.size() != g.num_nodes()) throw ParameterError("one Z value per node required");
  NodeValues out;
  out.rule = ValueRule::Propagated;
  out.x.resize(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const auto nbrs = g.neighbors(static_cast<NodeId>(j));
    double x = z[j];
    if (!nbrs.empty()) {
      double sum = 0.0;
      for (const NodeId k : nbrs) sum += z[k];
      x += sum / static_cast<double>(nbrs.size());
    }
    out.x[j] = x;
  }
  out.z = std::move(z);
  return out;
}

double draw(const ValueLaw& law, Rng& rng) {
  if (const auto* model = std::get_if<TailModel>(&law)) return draw(*model, rng);
  return rng.exponential();
}

NodeValues assign_node_values(const Graph& g, const ValueLaw& z_law, std::uint64_t seed,
                              std::uint64_t replicate_id) {
  Rng rng(seed, StreamTag::kNodeValues, replicate_id);
  std::vector<double> z(g.num_nodes());
  if (const auto* model = std::get_if<TailModel>(&z_law)) {
    // Keep one sampler alive for the whole draw (F1 builds an envelope).
    const auto sample = sample_process(ProcessSpec{process::Iid{*model}}, std::max<std::size_t>(z.size(), 1),
                                       derive_seed(seed, 0x6E6F6465ULL), replicate_id);
    std::copy_n(sample.values.begin(), z.size(), z.begin());
  } else {
    for (auto& v : z) v = rng.exponential();
  }
  return propagate(g, std::move(z));
}

double analytic_propagated_covariance(const Graph& g, NodeId i, NodeId j) {
  const auto row_i = propagation_row(g, i);
  const auto row_j = propagation_row(g, j);
  double cov = 0.0;
  for (const auto& [k, weight] : row_i) {
    if (const auto it = row_j.find(k); it != row_j.end()) cov += weight * it->second;
  }
  return cov;
}

bool DecorrelationReport::passed() const {
  return std::all_of(classes.begin(), classes.end(),
                     [](const DistanceClassReport& c) { return !c.pass || *c.pass; });
}

DecorrelationReport verify_distance_decorrelation(const Graph& g, const ValueLaw& light_law,
                                                  std::size_t replicates, std::uint64_t seed,
                                                  const DecorrelationOptions& options) {
  if (replicates < 2) {
    throw DomainError("covariance standard errors need at least 2 replicates");
  }
  if (g.directed()) throw ParameterError("value propagation needs an undirected graph");
  if (const auto* model = std::get_if<TailModel>(&light_law); model && model->alpha() <= 2.0) {
    throw DomainError("decorrelation check needs a finite-variance Z law (alpha > 2)");
  }
  const std::size_t n = g.num_nodes();

  // Pair selection.
  Rng pair_rng(seed, StreamTag::kPairs, 0);
  std::array<std::vector<std::pair<NodeId, NodeId>>, 3> pairs;
  std::set<std::pair<NodeId, NodeId>> seen;
  const std::size_t budget = 50 * std::max<std::size_t>(options.pairs_per_class, 1);
  for (int cls = 0; cls < 3; ++cls) {
    for (std::size_t attempt = 0; attempt < budget && pairs[cls].size() < options.pairs_per_class; ++attempt) {
      const auto i = static_cast<NodeId>(pair_rng.below(n));
      const auto dist = bfs_distances(g, i, 2);
      std::vector<NodeId> candidates;
      if (cls < 2) {
        for (const auto& [node, d] : dist) {
          if (d == static_cast<std::uint32_t>(cls + 1)) candidates.push_back(node);
        }
        std::sort(candidates.begin(), candidates.end());
        if (candidates.empty()) continue;
        const NodeId j = candidates[pair_rng.below(candidates.size())];
        if (seen.insert(std::minmax(i, j)).second) pairs[cls].emplace_back(i, j);
      } else {
        if (dist.size() >= n) continue;
        for (int tries = 0; tries < 64; ++tries) {
          const auto j = static_cast<NodeId>(pair_rng.below(n));
          if (!dist.contains(j)) {
            if (seen.insert(std::minmax(i, j)).second) pairs[cls].emplace_back(i, j);
            break;
          }
        }
      }
    }
  }

  std::vector<NodeId> tracked;
  for (const auto& list : pairs) {
    for (const auto& [i, j] : list) {
      tracked.push_back(i);
      tracked.push_back(j);
    }
  }
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
  auto slot = [&](NodeId v) {
    return static_cast<std::size_t>(std::lower_bound(tracked.begin(), tracked.end(), v) - tracked.begin());
  };

  // values[r * T + s] = X of tracked node s in replicate r.
  const std::size_t width = tracked.size();
  std::vector<double> values(replicates * width);
  parallel_for(replicates, [&](std::size_t r) {
    Rng rng(seed, StreamTag::kNodeValues, r);
    std::vector<double> z(n);
    for (auto& v : z) v = draw(light_law, rng);
    for (std::size_t s = 0; s < width; ++s) {
      const NodeId v = tracked[s];
      const auto nbrs = g.neighbors(v);
      double x = z[v];
      if (!nbrs.empty()) {
        double sum = 0.0;
        for (const NodeId k : nbrs) sum += z[k];
        x += sum / static_cast<double>(nbrs.size());
      }
      values[r * width + s] = x;
    }
  });

  std::vector<double> means(width, 0.0);
  for (std::size_t r = 0; r < replicates; ++r) {
    for (std::size_t s = 0; s < width; ++s) means[s] += values[r * width + s];
  }
  for (auto& m : means) m /= static_cast<double>(replicates);

  DecorrelationReport report;
  report.replicates = replicates;
  const double rcount = static_cast<double>(replicates);
  for (int cls = 0; cls < 3; ++cls) {
    DistanceClassReport entry;
    entry.distance = static_cast<std::uint32_t>(cls + 1);
    entry.present = !pairs[cls].empty();
    bool all_ok = true;
    for (const auto& [i, j] : pairs[cls]) {
      const std::size_t si = slot(i), sj = slot(j);
      std::vector<double> products(replicates);
      double sum = 0.0;
      for (std::size_t r = 0; r < replicates; ++r) {
        products[r] = (values[r * width + si] - means[si]) * (values[r * width + sj] - means[sj]);
        sum += products[r];
      }
      const double mean_product = sum / rcount;
      double ss = 0.0;
      for (const double p : products) ss += (p - mean_product) * (p - mean_product);
      PairCovariance pc;
      pc.i = i;
      pc.j = j;
      pc.distance = entry.distance;
      pc.covariance = sum / (rcount - 1.0);
      pc.standard_error = std::sqrt(ss / (rcount - 1.0)) / std::sqrt(rcount);
      pc.analytic = analytic_propagated_covariance(g, i, j);
      if (cls == 0) all_ok = all_ok && pc.covariance > 3.0 * pc.standard_error;
      if (cls == 2) all_ok = all_ok && std::abs(pc.covariance) <= 3.0 * pc.standard_error;
      entry.pairs.push_back(pc);
    }
    if (entry.present && cls != 1) entry.pass = all_ok;
    report.classes.push_back(std::move(entry));
  }
  return report;
}

EdgeListParser::EdgeListParser(EdgeListOptions options) : options_(std::move(options)) {
  if (options_.source_column == options_.target_column) {
    throw ParameterError("source and target columns must differ");
  }
}

void EdgeListParser::feed(std::string_view chunk) {
  std::size_t start = 0;
  for (;;) {
    const auto newline = chunk.find('\n', start);
    if (newline == std::string_view::npos) {
      pending_.append(chunk.substr(start));
      return;
    }
    if (pending_.empty()) {
      parse_line(chunk.substr(start, newline - start));
    } else {
      pending_.append(chunk.substr(start, newline - start));
      parse_line(pending_);
      pending_.clear();
    }
    start = newline + 1;
  }
}

void EdgeListParser::parse_line(std::string_view line) {
  ++line_number_;
  line = trim(line);
  if (line.empty()) return;
  if (!options_.comment_prefix.empty() && line.starts_with(options_.comment_prefix)) return;
  const auto fields = split_fields(line, options_.delimiter);
  const std::size_t needed = std::max(options_.source_column, options_.target_column) + 1;
  if (fields.size() < needed) {
    throw ParseError("edge list line has " + std::to_string(fields.size()) + " fields, expected at least " +
                         std::to_string(needed),
                     line_number_);
  }
  auto parse_id = [&](std::string_view field) {
    std::uint64_t id = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
    if (ec == std::errc::result_out_of_range) {
      throw ParseError("node id overflow: '" + std::string(field) + "'", line_number_);
    }
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ParseError("malformed node id '" + std::string(field) + "'", line_number_);
    }
    return id;
  };
  raw_edges_.emplace_back(parse_id(fields[options_.source_column]),
                          parse_id(fields[options_.target_column]));
}

Graph EdgeListParser::finish() {
  if (!pending_.empty()) {
    parse_line(pending_);
    pending_.clear();
  }
  auto dense_ids = [](std::vector<std::uint64_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  auto index_of = [](const std::vector<std::uint64_t>& ids, std::uint64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<std::uint64_t> left, right;
  left.reserve(raw_edges_.size() * (options_.bipartite ? 1 : 2));
  for (const auto& [a, b] : raw_edges_) {
    left.push_back(a);
    (options_.bipartite ? right : left).push_back(b);
  }
  left = dense_ids(std::move(left));
  right = dense_ids(std::move(right));
  const std::size_t total = left.size() + right.size();
  if (total > std::numeric_limits<NodeId>::max()) {
    throw ParseError("node id overflow: more than 2^32 - 1 distinct nodes");
  }

  std::vector<Graph::Edge> edges;
  edges.reserve(raw_edges_.size());
  const auto offset = static_cast<NodeId>(left.size());
  for (const auto& [a, b] : raw_edges_) {
    const NodeId from = index_of(left, a);
    const NodeId to = options_.bipartite ? offset + index_of(right, b) : index_of(left, b);
    edges.push_back({from, to});
  }
  raw_edges_.clear();
  raw_edges_.shrink_to_fit();

  const bool directed = options_.directed && !options_.bipartite;
  Graph g = Graph::from_edges(total, std::move(edges), directed);
  if (options_.bipartite) g.set_bipartite_sides(left.size(), right.size());
  left.insert(left.end(), right.begin(), right.end());
  g.set_original_ids(std::move(left));
  return g;
}

Graph load_edge_list(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  EdgeListParser parser(options);
  std::string buffer(1 << 20, '\0');
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    parser.feed(std::string_view(buffer.data(), got));
  }
  return parser.finish();
}

SampleSet node_activity(const Graph& g, const ActivityOptions& options) {
  SampleSet out;
  std::vector<NodeId> nodes;
  switch (options.mode) {
    case ActivityMode::OutDegree:
      if (!g.directed()) throw ParameterError("out-degree activity requires a directed graph");
      break;
    case ActivityMode::Degree:
      break;
    case ActivityMode::SideDegree:
      if (!g.bipartite()) throw ParameterError("side degree requested on a non-bipartite graph");
      if (options.side != 0 && options.side != 1) throw ParameterError("bipartite side must be 0 or 1");
      break;
  }
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const auto node = static_cast<NodeId>(v);
    double value = 0.0;
    switch (options.mode) {
      case ActivityMode::OutDegree:
        value = static_cast<double>(g.degree(node));
        break;
      case ActivityMode::Degree:
        value = static_cast<double>(g.directed() ? g.degree(node) + g.in_degree(node) : g.degree(node));
        break;
      case ActivityMode::SideDegree:
        if (g.side_of(node) != options.side) continue;
        value = static_cast<double>(g.degree(node));
        break;
    }
    if (options.drop_zeros && value == 0.0) continue;
    out.values.push_back(value);
  }
  return out;
}

}  // namespace taylorlaw

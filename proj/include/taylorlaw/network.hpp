#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "taylorlaw/distributions.hpp"
#include "taylorlaw/tail_model.hpp"

namespace taylorlaw {

using NodeId = std::uint32_t;

// Adjacency in compressed sparse row form. For directed graphs neighbors()
// lists out-neighbours; in-degrees are kept separately. Bipartite graphs
// place side 0 at ids [0, side_size(0)) and side 1 after it.
class Graph {
 public:
  struct Edge {
    NodeId from;
    NodeId to;
  };

  Graph() = default;

  // Self-loops are dropped and duplicate edges collapsed. For undirected
  // graphs (a, b) and (b, a) are the same edge.
  static Graph from_edges(std::size_t n_nodes, std::vector<Edge> edges, bool directed);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Distinct edges; an undirected edge counts once.
  std::size_t num_edges() const noexcept { return edge_count_; }
  bool directed() const noexcept { return directed_; }

  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;  // out-degree when directed
  std::size_t in_degree(NodeId v) const;
  std::size_t max_degree() const;

  bool bipartite() const noexcept { return side_sizes_.has_value(); }
  std::size_t side_size(int side) const;
  int side_of(NodeId v) const;
  void set_bipartite_sides(std::size_t side0, std::size_t side1);

  // Original identifiers of ingested nodes, indexed by dense id (empty for
  // generated graphs).
  const std::vector<std::uint64_t>& original_ids() const noexcept { return original_ids_; }
  void set_original_ids(std::vector<std::uint64_t> ids) { original_ids_ = std::move(ids); }

  // FNV-1a over the CSR arrays and flags.
  std::uint64_t structure_hash() const;

 private:
  bool directed_ = false;
  std::size_t edge_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<std::uint32_t> in_degrees_;
  std::optional<std::pair<std::size_t, std::size_t>> side_sizes_;
  std::vector<std::uint64_t> original_ids_;
};

// Each unordered pair joined independently with probability p (geometric
// skipping, O(n + m)). If cap is set and any degree exceeds it, the graph is
// discarded and redrawn from the next substream, at most max_attempts times.
struct ErdosRenyiResult {
  Graph graph;
  std::size_t attempts = 1;
};

constexpr std::size_t kDefaultRegenerationBudget = 1000;

ErdosRenyiResult gen_erdos_renyi(std::size_t n, double p, std::optional<std::size_t> cap,
                                 std::uint64_t seed,
                                 std::size_t max_attempts = kDefaultRegenerationBudget);

using DistanceMap = std::unordered_map<NodeId, std::uint32_t>;

// Unweighted BFS distances from source, limited to distance <= cutoff.
DistanceMap bfs_distances(const Graph& g, NodeId source, std::uint32_t cutoff);

enum class ValueRule { Propagated, Raw };

struct NodeValues {
  std::vector<double> x;
  std::vector<double> z;
  ValueRule rule = ValueRule::Propagated;
};

// x_j = z_j + mean(z over neighbours of j); x_j = z_j for isolated j.
NodeValues propagate(const Graph& g, std::vector<double> z);

struct UnitExponential {};
using ValueLaw = std::variant<TailModel, UnitExponential>;

double draw(const ValueLaw& law, Rng& rng);

NodeValues assign_node_values(const Graph& g, const ValueLaw& z_law, std::uint64_t seed,
                              std::uint64_t replicate_id = 0);

// Cov(X_i, X_j) of propagated values for unit-variance i.i.d. Z, from the
// sparse propagation matrix. Zero whenever d(i, j) >= 3.
double analytic_propagated_covariance(const Graph& g, NodeId i, NodeId j);

struct PairCovariance {
  NodeId i = 0;
  NodeId j = 0;
  std::uint32_t distance = 0;  // 3 stands for "3 or more"
  double covariance = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;
};

struct DistanceClassReport {
  std::uint32_t distance = 0;  // 1, 2 or 3 (meaning >= 3)
  bool present = false;
  std::vector<PairCovariance> pairs;
  // d = 1: every pair has cov > 3 SE. d >= 3: every pair has |cov| <= 3 SE.
  // d = 2 is reported without a verdict.
  std::optional<bool> pass;
};

struct DecorrelationReport {
  std::size_t replicates = 0;
  std::vector<DistanceClassReport> classes;

  bool passed() const;
};

struct DecorrelationOptions {
  std::size_t pairs_per_class = 10;
};

DecorrelationReport verify_distance_decorrelation(const Graph& g, const ValueLaw& light_law,
                                                  std::size_t replicates, std::uint64_t seed,
                                                  const DecorrelationOptions& options = {});

struct EdgeListOptions {
  std::string comment_prefix = "#";
  // Field separator; nullopt splits on runs of spaces and tabs.
  std::optional<char> delimiter;
  bool directed = true;
  bool bipartite = false;
  std::size_t source_column = 0;
  std::size_t target_column = 1;
};

// Streaming parser: text may arrive in arbitrary chunks, lines may straddle
// chunk boundaries. Node ids are remapped to dense ids in ascending order of
// original id (per side for bipartite graphs).
class EdgeListParser {
 public:
  explicit EdgeListParser(EdgeListOptions options);

  void feed(std::string_view chunk);
  Graph finish();

  std::size_t lines_read() const noexcept { return line_number_; }

 private:
  void parse_line(std::string_view line);

  EdgeListOptions options_;
  std::string pending_;
  std::size_t line_number_ = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw_edges_;
};

Graph load_edge_list(const std::string& path, const EdgeListOptions& options = {});

enum class ActivityMode { OutDegree, Degree, SideDegree };

struct ActivityOptions {
  ActivityMode mode = ActivityMode::Degree;
  int side = 1;  // for SideDegree
  bool drop_zeros = false;
};

SampleSet node_activity(const Graph& g, const ActivityOptions& options);

}  // namespace taylorlaw

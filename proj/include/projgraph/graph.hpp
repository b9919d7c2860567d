#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace projgraph {

using NodeId = std::uint32_t;
using DyadIndex = std::uint64_t;

/// C(n, 2).
constexpr std::uint64_t dyad_count(std::uint64_t n) {
  return n == 0 ? 0 : n * (n - 1) / 2;
}

/// Column-major upper-triangle index of dyad {i, j}, i < j.
constexpr DyadIndex dyad_index(NodeId i, NodeId j) {
  return static_cast<DyadIndex>(j) * (j - 1) / 2 + i;
}

/// Inverse of dyad_index: returns (i, j) with i < j.
std::pair<NodeId, NodeId> dyad_nodes(DyadIndex k);

/// Undirected simple graph on nodes 0..n-1, one bit per unordered pair.
class Graph {
 public:
  explicit Graph(NodeId n);
  Graph(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  static Graph complete(NodeId n);

  NodeId n() const { return n_; }
  std::uint64_t dyads() const { return dyad_count(n_); }

  bool dyad(DyadIndex k) const { return (words_[k >> 6] >> (k & 63)) & 1u; }
  bool has_edge(NodeId a, NodeId b) const;

  void set_dyad(DyadIndex k, bool present);
  void add_edge(NodeId a, NodeId b);

  /// Edges as (i, j), i < j, in dyad-index order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  NodeId n_;
  std::vector<std::uint64_t> words_;
};

/// Strictly increasing node list drawn from a parent graph of parent_n nodes.
class NodeSubset {
 public:
  NodeSubset(NodeId parent_n, std::vector<NodeId> members);

  /// {0, ..., size-1}.
  static NodeSubset prefix(NodeId parent_n, NodeId size);

  NodeId parent_n() const { return parent_n_; }
  const std::vector<NodeId>& members() const { return members_; }
  NodeId size() const { return static_cast<NodeId>(members_.size()); }

  /// Composition: the subset of the parent selected by inner positions of this.
  NodeSubset compose(const NodeSubset& inner) const;

 private:
  NodeId parent_n_;
  std::vector<NodeId> members_;
};

std::uint64_t edge_count(const Graph& g);
std::uint64_t triangle_count(const Graph& g);
std::vector<std::uint64_t> degree_sequence(const Graph& g);
double mean_degree(const Graph& g);
bool is_connected(const Graph& g);

Graph induced_subgraph(const Graph& g, const NodeSubset& s);

/// Largest n whose graphs fit the 64-bit enumeration index.
inline constexpr NodeId kMaxIndexableNodes = 11;

/// Graph whose dyad bit vector, read as a binary number, equals k.
Graph graph_from_index(NodeId n, std::uint64_t k);
std::uint64_t graph_to_index(const Graph& g);

}  // namespace projgraph

#include "projgraph/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "projgraph/errors.hpp"

namespace projgraph {

std::pair<NodeId, NodeId> dyad_nodes(DyadIndex k) {
  auto j = static_cast<std::uint64_t>(
      (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (dyad_count(j) > k) --j;
  while (dyad_count(j + 1) <= k) ++j;
  return {static_cast<NodeId>(k - dyad_count(j)), static_cast<NodeId>(j)};
}

Graph::Graph(NodeId n) : n_(n), words_((dyad_count(n) + 63) / 64, 0) {
  if (n == 0) throw InvalidArgument("graph must have at least one node");
}

Graph::Graph(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges)
    : Graph(n) {
  for (auto [a, b] : edges) add_edge(a, b);
}

Graph Graph::complete(NodeId n) {
  Graph g(n);
  for (DyadIndex k = 0; k < g.dyads(); ++k) g.set_dyad(k, true);
  return g;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a == b || a >= n_ || b >= n_) return false;
  if (a > b) std::swap(a, b);
  return dyad(dyad_index(a, b));
}

void Graph::set_dyad(DyadIndex k, bool present) {
  const std::uint64_t bit = std::uint64_t{1} << (k & 63);
  if (present)
    words_[k >> 6] |= bit;
  else
    words_[k >> 6] &= ~bit;
}

void Graph::add_edge(NodeId a, NodeId b) {
  if (a == b) throw InvalidArgument("self-loop on node " + std::to_string(a));
  if (a >= n_ || b >= n_)
    throw InvalidArgument("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") out of range for n=" + std::to_string(n_));
  if (a > b) std::swap(a, b);
  set_dyad(dyad_index(a, b), true);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId j = 1; j < n_; ++j)
    for (NodeId i = 0; i < j; ++i)
      if (dyad(dyad_index(i, j))) out.emplace_back(i, j);
  return out;
}

NodeSubset::NodeSubset(NodeId parent_n, std::vector<NodeId> members)
    : parent_n_(parent_n), members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("invalid-subset: empty node subset");
  for (std::size_t a = 0; a < members_.size(); ++a) {
    if (members_[a] >= parent_n_)
      throw InvalidArgument("invalid-subset: node " + std::to_string(members_[a]) +
                            " >= parent size " + std::to_string(parent_n_));
    if (a > 0 && members_[a] <= members_[a - 1])
      throw InvalidArgument("invalid-subset: members must be strictly increasing");
  }
}

NodeSubset NodeSubset::prefix(NodeId parent_n, NodeId size) {
  std::vector<NodeId> m(size);
  std::iota(m.begin(), m.end(), NodeId{0});
  return NodeSubset(parent_n, std::move(m));
}

NodeSubset NodeSubset::compose(const NodeSubset& inner) const {
  if (inner.parent_n() != size())
    throw InvalidArgument("invalid-subset: composed subset has wrong parent size");
  std::vector<NodeId> m;
  m.reserve(inner.size());
  for (NodeId p : inner.members()) m.push_back(members_[p]);
  return NodeSubset(parent_n_, std::move(m));
}

std::uint64_t edge_count(const Graph& g) {
  std::uint64_t c = 0;
  for (std::uint64_t w : g.words()) c += std::popcount(w);
  return c;
}

namespace {

// Adjacency rows as bitsets of ceil(n/64) words each.
std::vector<std::uint64_t> adjacency_rows(const Graph& g, std::size_t& stride) {
  const NodeId n = g.n();
  stride = (n + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n) * stride, 0);
  for (auto [i, j] : g.edges()) {
    rows[i * stride + (j >> 6)] |= std::uint64_t{1} << (j & 63);
    rows[j * stride + (i >> 6)] |= std::uint64_t{1} << (i & 63);
  }
  return rows;
}

}  // namespace

std::uint64_t triangle_count(const Graph& g) {
  std::size_t stride = 0;
  const auto rows = adjacency_rows(g, stride);
  std::uint64_t total = 0;
  // Each triangle i<j<k counted once at its edge (i, j) via common neighbours k > j.
  for (auto [i, j] : g.edges()) {
    const std::size_t first = (j + 1) >> 6;
    for (std::size_t w = first; w < stride; ++w) {
      std::uint64_t common = rows[i * stride + w] & rows[j * stride + w];
      if (w == first) common &= ~std::uint64_t{0} << ((j + 1) & 63);
      total += std::popcount(common);
    }
  }
  return total;
}

std::vector<std::uint64_t> degree_sequence(const Graph& g) {
  std::vector<std::uint64_t> deg(g.n(), 0);
  for (auto [i, j] : g.edges()) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

double mean_degree(const Graph& g) {
  return 2.0 * static_cast<double>(edge_count(g)) / g.n();
}

bool is_connected(const Graph& g) {
  const NodeId n = g.n();
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  NodeId components = n;
  for (auto [i, j] : g.edges()) {
    const NodeId a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

Graph induced_subgraph(const Graph& g, const NodeSubset& s) {
  if (s.parent_n() != g.n())
    throw InvalidArgument("invalid-subset: subset parent size " +
                          std::to_string(s.parent_n()) + " != graph size " +
                          std::to_string(g.n()));
  const auto& m = s.members();
  Graph out(s.size());
  for (NodeId b = 1; b < s.size(); ++b)
    for (NodeId a = 0; a < b; ++a)
      if (g.dyad(dyad_index(m[a], m[b]))) out.set_dyad(dyad_index(a, b), true);
  return out;
}

Graph graph_from_index(NodeId n, std::uint64_t k) {
  if (n > kMaxIndexableNodes)
    throw InvalidArgument("invalid-index: n=" + std::to_string(n) +
                          " exceeds the 64-bit enumeration index");
  Graph g(n);
  const std::uint64_t d = g.dyads();
  if (d < 64 && (k >> d) != 0)
    throw InvalidArgument("invalid-index: " + std::to_string(k) + " >= 2^" +
                          std::to_string(d));
  for (DyadIndex b = 0; b < d; ++b)
    if ((k >> b) & 1u) g.set_dyad(b, true);
  return g;
}

std::uint64_t graph_to_index(const Graph& g) {
  if (g.n() > kMaxIndexableNodes)
    throw InvalidArgument("invalid-index: n=" + std::to_string(g.n()) +
                          " exceeds the 64-bit enumeration index");
  return g.words().empty() ? 0 : g.words()[0];
}

}  // namespace projgraph

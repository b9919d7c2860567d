#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "projgraph/edge_list.hpp"
#include "projgraph/errors.hpp"
#include "projgraph/graph.hpp"
#include "projgraph/random.hpp"

using namespace projgraph;

namespace {

Graph cycle4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }

// Naive triple loop over has_edge; independent of the bitset path.
std::uint64_t brute_triangles(const Graph& g) {
  std::uint64_t t = 0;
  for (NodeId a = 0; a < g.n(); ++a)
    for (NodeId b = a + 1; b < g.n(); ++b)
      for (NodeId c = b + 1; c < g.n(); ++c)
        t += g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c);
  return t;
}

Graph random_graph(NodeId n, double p, RandomStream& rng) {
  Graph g(n);
  for (DyadIndex k = 0; k < g.dyads(); ++k) g.set_dyad(k, rng.uniform() < p);
  return g;
}

NodeSubset random_subset(NodeId parent, NodeId k, RandomStream& rng) {
  std::vector<NodeId> all(parent);
  std::iota(all.begin(), all.end(), NodeId{0});
  for (NodeId i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(parent - i)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return NodeSubset(parent, all);
}

}  // namespace

TEST_CASE("dyad_count") {
  CHECK(dyad_count(1) == 0);
  CHECK(dyad_count(4) == 6);
  CHECK(dyad_count(7) == 21);
}

TEST_CASE("dyad index is a column-major bijection") {
  for (NodeId n = 1; n <= 12; ++n) {
    std::vector<int> seen(dyad_count(n), 0);
    for (NodeId j = 1; j < n; ++j)
      for (NodeId i = 0; i < j; ++i) {
        const auto k = dyad_index(i, j);
        REQUIRE(k < seen.size());
        ++seen[k];
        CHECK(dyad_nodes(k) == std::pair{i, j});
      }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
  CHECK(dyad_index(0, 1) == 0);
  CHECK(dyad_index(0, 2) == 1);
  CHECK(dyad_index(1, 2) == 2);
}

TEST_CASE("edge and triangle counts") {
  CHECK(edge_count(Graph(3)) == 0);
  CHECK(edge_count(Graph::complete(4)) == 6);
  CHECK(edge_count(Graph::complete(3)) == 3);
  CHECK(triangle_count(Graph::complete(3)) == 1);
  CHECK(triangle_count(Graph::complete(4)) == 4);
  CHECK(triangle_count(cycle4()) == 0);
  CHECK(triangle_count(Graph::complete(70)) == 70ull * 69 * 68 / 6);
}

TEST_CASE("degrees") {
  CHECK(degree_sequence(Graph::complete(3)) == std::vector<std::uint64_t>{2, 2, 2});
  CHECK(mean_degree(Graph::complete(3)) == 2.0);
  CHECK(mean_degree(Graph(5)) == 0.0);
  const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(degree_sequence(star) == std::vector<std::uint64_t>{3, 1, 1, 1});
  CHECK(mean_degree(star) == 1.5);
}

TEST_CASE("exhaustive statistics invariants for n <= 6") {
  for (NodeId n = 1; n <= 6; ++n) {
    const std::uint64_t total = std::uint64_t{1} << dyad_count(n);
    for (std::uint64_t k = 0; k < total; ++k) {
      const Graph g = graph_from_index(n, k);
      REQUIRE(triangle_count(g) == brute_triangles(g));
      if (n <= 5) {
        const auto deg = degree_sequence(g);
        CHECK(std::accumulate(deg.begin(), deg.end(), std::uint64_t{0}) == 2 * edge_count(g));
        CHECK(graph_to_index(g) == k);
      }
    }
  }
}

TEST_CASE("graph index examples and errors") {
  CHECK(graph_from_index(3, 0) == Graph(3));
  CHECK(graph_from_index(3, 7) == Graph::complete(3));
  CHECK_THROWS_AS(graph_from_index(3, 8), InvalidArgument);
  CHECK_THROWS_AS(graph_from_index(12, 0), InvalidArgument);
}

TEST_CASE("induced subgraphs") {
  const Graph k4 = Graph::complete(4);
  CHECK(induced_subgraph(k4, NodeSubset(4, {0, 2, 3})) == Graph::complete(3));
  CHECK(induced_subgraph(Graph(6), NodeSubset(6, {1, 4})) == Graph(2));
  CHECK(induced_subgraph(cycle4(), NodeSubset(4, {0, 1, 2})) == Graph(3, {{0, 1}, {1, 2}}));
  CHECK_THROWS_AS(induced_subgraph(k4, NodeSubset(5, {0, 4})), InvalidArgument);
  CHECK_THROWS_AS(NodeSubset(4, {0, 4}), InvalidArgument);
  CHECK_THROWS_AS(NodeSubset(4, {2, 1}), InvalidArgument);
  CHECK_THROWS_AS(NodeSubset(4, {}), InvalidArgument);
}

TEST_CASE("induced subgraph is compositional") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const NodeId n = static_cast<NodeId>(2 + rng.below(7));  // 2..8
    const Graph g = random_graph(n, 0.5, rng);
    const NodeSubset s = random_subset(n, static_cast<NodeId>(1 + rng.below(n)), rng);
    const NodeSubset t = random_subset(s.size(), static_cast<NodeId>(1 + rng.below(s.size())), rng);
    CHECK(induced_subgraph(induced_subgraph(g, s), t) == induced_subgraph(g, s.compose(t)));
  }
}

TEST_CASE("connectivity") {
  CHECK(is_connected(Graph::complete(3)));
  CHECK_FALSE(is_connected(Graph(2)));
  CHECK(is_connected(Graph(4, {{0, 1}, {1, 2}, {2, 3}})));
  CHECK(is_connected(Graph(1)));
  CHECK_FALSE(is_connected(Graph(4, {{0, 1}, {2, 3}})));
}

TEST_CASE("edge-list format") {
  std::stringstream ss;
  write_edge_list(ss, cycle4());
  CHECK(ss.str() == "4\n0 1\n1 2\n0 3\n2 3\n");
  CHECK(read_edge_list(ss) == cycle4());

  std::stringstream two("3\n0 1\n# comment\n\n2\n0 1\n");
  const auto graphs = read_edge_lists(two);
  REQUIRE(graphs.size() == 2);
  CHECK(graphs[0] == Graph(3, {{0, 1}}));
  CHECK(graphs[1] == Graph::complete(2));

  for (const char* bad : {"3\n1 1\n", "3\n0 3\n", "3\n2 1\n", "3\n0 1\n0 1\n", "0 1\n",
                          "3\n0 1 2\n", "0\n", "x\n"}) {
    std::stringstream in(bad);
    CHECK_THROWS_AS(read_edge_lists(in), InvalidArgument);
  }
}

TEST_CASE("random stream determinism and independence") {
  auto a = RandomStream::derive(7, {1, 2, 3});
  auto b = RandomStream::derive(7, {1, 2, 3});
  auto c = RandomStream::derive(7, {1, 2, 4});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  RandomStream u(11);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

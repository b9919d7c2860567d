#include <doctest.h>

#include <cmath>

#include "projgraph/errors.hpp"
#include "projgraph/models.hpp"
#include "projgraph/numeric.hpp"

using namespace projgraph;

namespace {
ParamVector th(double a) { return ParamVector::Constant(1, a); }
ParamVector th(double a, double b) { return (ParamVector(2) << a, b).finished(); }
}  // namespace

TEST_CASE("natural parameter map") {
  const auto offset = ModelSpec::bernoulli_offset();
  CHECK(natural_params(offset, th(0), 1).eta(0) == 0.0);
  CHECK(natural_params(offset, th(1), 10).eta(0) == doctest::Approx(-1.302585).epsilon(1e-6));
  for (NodeId n : {1u, 5u, 100u})
    CHECK(natural_params(ModelSpec::bernoulli_invariant(), th(0.7), n).eta(0) == 0.7);
}

TEST_CASE("size invariance of the invariant families") {
  for (NodeId n = 2; n <= 8; ++n) {
    CHECK(natural_params(ModelSpec::bernoulli_invariant(), th(-0.3), n).eta ==
          natural_params(ModelSpec::bernoulli_invariant(), th(-0.3), 2).eta);
    CHECK(natural_params(ModelSpec::edge_triangle(), th(0.2, -1.1), n).eta ==
          natural_params(ModelSpec::edge_triangle(), th(0.2, -1.1), 2).eta);
  }
}

TEST_CASE("offset identity") {
  const auto offset = ModelSpec::bernoulli_offset();
  for (double t : {-3.0, 0.0, 0.5, 4.0})
    for (NodeId n : {1u, 3u, 17u})
      for (NodeId m : {2u, 50u}) {
        const double diff = natural_params(offset, th(t), n).eta(0) -
                            natural_params(offset, th(t), m).eta(0);
        CHECK(diff == doctest::Approx(std::log(double(m)) - std::log(double(n))).epsilon(1e-14));
      }
}

TEST_CASE("edge probabilities") {
  CHECK(edge_prob(ModelSpec::bernoulli_invariant(), th(0), 9) == 0.5);
  CHECK(edge_prob(ModelSpec::bernoulli_offset(), th(0), 4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(edge_prob(ModelSpec::bernoulli_offset(), th(1), 10) == doctest::Approx(0.21370).epsilon(1e-4));
  CHECK_THROWS_AS(edge_prob(ModelSpec::edge_triangle(), th(0, 0), 3), InvalidArgument);
  for (double p : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999999})
    CHECK(std::abs(logistic(logit(p)) - p) <= 1e-12);
}

TEST_CASE("sufficient statistics and kernel") {
  const Graph k4 = Graph::complete(4);
  CHECK(sufficient_stats(ModelSpec::bernoulli_offset(), k4) == StatsVector::Constant(1, 6));
  CHECK(sufficient_stats(ModelSpec::edge_triangle(), k4) == th(6, 4));
  CHECK(sufficient_stats(ModelSpec::edge_triangle(), Graph(5)) == th(0, 0));

  CHECK(log_unnormalized(ModelSpec::bernoulli_invariant(), th(0), 4, k4) == 0.0);
  CHECK(log_unnormalized(ModelSpec::edge_triangle(), th(0, 1.7), 3, Graph::complete(3)) == 1.7);
  const Graph five(10, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  CHECK(log_unnormalized(ModelSpec::bernoulli_offset(), th(1), 10, five) ==
        doctest::Approx(-6.512925).epsilon(1e-6));
  CHECK_THROWS_AS(log_unnormalized(ModelSpec::bernoulli_offset(), th(1), 9, five),
                  InvalidArgument);
}

TEST_CASE("edge-triangle with zero triangle weight matches the invariant Bernoulli kernel") {
  for (NodeId n = 1; n <= 5; ++n)
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << dyad_count(n)); ++k) {
      const Graph g = graph_from_index(n, k);
      REQUIRE(log_unnormalized(ModelSpec::edge_triangle(), th(0.37, 0), n, g) ==
              log_unnormalized(ModelSpec::bernoulli_invariant(), th(0.37), n, g));
    }
}

TEST_CASE("theta validation and family names") {
  CHECK_THROWS_AS(natural_params(ModelSpec::edge_triangle(), th(1), 3), InvalidArgument);
  CHECK_THROWS_AS(natural_params(ModelSpec::bernoulli_offset(), th(NAN), 3), InvalidArgument);
  for (auto f : {Family::BernoulliInvariant, Family::BernoulliOffset, Family::EdgeTriangle})
    CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("ergm"), InvalidArgument);
}

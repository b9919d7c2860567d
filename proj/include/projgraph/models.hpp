#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "projgraph/graph.hpp"

namespace projgraph {

using ParamVector = Eigen::VectorXd;
using StatsVector = Eigen::VectorXd;

enum class Family { BernoulliInvariant, BernoulliOffset, EdgeTriangle };

/// An exponential family of graph distributions: which sufficient statistics
/// it uses and how theta maps to natural parameters at a given size.
///
/// BernoulliInvariant: s = [edges],            eta = theta
/// BernoulliOffset:    s = [edges],            eta = theta - log n
/// EdgeTriangle:       s = [edges, triangles], eta = theta
struct ModelSpec {
  Family family = Family::BernoulliInvariant;

  static ModelSpec bernoulli_invariant() { return {Family::BernoulliInvariant}; }
  static ModelSpec bernoulli_offset() { return {Family::BernoulliOffset}; }
  static ModelSpec edge_triangle() { return {Family::EdgeTriangle}; }

  int stat_dim() const { return family == Family::EdgeTriangle ? 2 : 1; }
  bool offset_edges() const { return family == Family::BernoulliOffset; }
  bool is_bernoulli() const { return family != Family::EdgeTriangle; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// "bernoulli-invariant", "bernoulli-offset", "edge-triangle".
std::string_view family_name(Family f);
/// Inverse of family_name; throws InvalidArgument.
Family parse_family(std::string_view name);

struct NaturalParams {
  Eigen::VectorXd eta;
  NodeId n = 1;
};

/// Throws InvalidArgument if theta has the wrong length or non-finite entries.
void validate_theta(const ModelSpec& spec, const ParamVector& theta);

NaturalParams natural_params(const ModelSpec& spec, const ParamVector& theta, NodeId n);

/// Edge probability logistic(eta_edge). Bernoulli families only.
double edge_prob(const ModelSpec& spec, const ParamVector& theta, NodeId n);

StatsVector sufficient_stats(const ModelSpec& spec, const Graph& g);

/// eta(theta, n) . s(g); g.n() must equal n.
double log_unnormalized(const ModelSpec& spec, const ParamVector& theta, NodeId n,
                        const Graph& g);

}  // namespace projgraph

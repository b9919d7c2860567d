#include "projgraph/models.hpp"

#include <cmath>

#include "projgraph/errors.hpp"
#include "projgraph/numeric.hpp"

namespace projgraph {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::BernoulliInvariant: return "bernoulli-invariant";
    case Family::BernoulliOffset: return "bernoulli-offset";
    case Family::EdgeTriangle: return "edge-triangle";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::BernoulliInvariant, Family::BernoulliOffset, Family::EdgeTriangle})
    if (family_name(f) == name) return f;
  throw InvalidArgument("unknown family '" + std::string(name) +
                        "' (expected bernoulli-invariant, bernoulli-offset or edge-triangle)");
}

void validate_theta(const ModelSpec& spec, const ParamVector& theta) {
  if (theta.size() != spec.stat_dim())
    throw InvalidArgument("theta for " + std::string(family_name(spec.family)) + " needs " +
                          std::to_string(spec.stat_dim()) + " component(s), got " +
                          std::to_string(theta.size()));
  if (!theta.allFinite()) throw InvalidArgument("theta must be finite");
}

NaturalParams natural_params(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  validate_theta(spec, theta);
  if (n == 0) throw InvalidArgument("node count must be >= 1");
  NaturalParams out{theta, n};
  if (spec.offset_edges()) out.eta(0) -= std::log(static_cast<double>(n));
  return out;
}

double edge_prob(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  if (!spec.is_bernoulli())
    throw InvalidArgument("unsupported-family: edge_prob needs a Bernoulli family");
  return logistic(natural_params(spec, theta, n).eta(0));
}

StatsVector sufficient_stats(const ModelSpec& spec, const Graph& g) {
  StatsVector s(spec.stat_dim());
  s(0) = static_cast<double>(edge_count(g));
  if (spec.family == Family::EdgeTriangle) s(1) = static_cast<double>(triangle_count(g));
  return s;
}

double log_unnormalized(const ModelSpec& spec, const ParamVector& theta, NodeId n,
                        const Graph& g) {
  if (g.n() != n)
    throw InvalidArgument("size mismatch: graph has " + std::to_string(g.n()) +
                          " nodes, model evaluated at n=" + std::to_string(n));
  return natural_params(spec, theta, n).eta.dot(sufficient_stats(spec, g));
}

}  // namespace projgraph

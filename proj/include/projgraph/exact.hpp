#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "projgraph/graph.hpp"
#include "projgraph/models.hpp"
#include "projgraph/random.hpp"

namespace projgraph {

// ---------------------------------------------------------------------------
// Enumeration cap
// ---------------------------------------------------------------------------

inline constexpr NodeId kDefaultEnumerationCap = 7;  // 2^21 graphs
inline constexpr NodeId kMaxEnumerationCap = 8;      // 2^28 graphs, ~2 GB table

/// Process-wide cap on n for exhaustive enumeration. Values above
/// kMaxEnumerationCap are rejected with EnumerationCapExceeded.
void set_enumeration_cap(NodeId cap);
NodeId enumeration_cap();

/// Throws EnumerationCapExceeded if n > enumeration_cap().
void require_enumerable(NodeId n);

// ---------------------------------------------------------------------------
// Sufficient-statistic histograms
// ---------------------------------------------------------------------------

/// Distinct sufficient-statistic values over all 2^C(n,2) graphs on n nodes,
/// with their multiplicities. Columns of `points` are statistic vectors.
struct StatHistogram {
  NodeId n = 1;
  Eigen::MatrixXd points;
  Eigen::VectorXd log_counts;
  std::vector<std::uint64_t> counts;
};

/// Cached per (statistic set, n); built by exhaustive enumeration.
const StatHistogram& stat_histogram(const ModelSpec& spec, NodeId n);

/// log Z, mean and covariance of the sufficient statistics of a histogram
/// reweighted by exp(eta . s).
struct StatMoments {
  double log_z = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

StatMoments histogram_moments(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& log_counts,
                              const Eigen::VectorXd& eta);

// ---------------------------------------------------------------------------
// Normalizers and moments
// ---------------------------------------------------------------------------

/// Analytic for Bernoulli families (C(n,2) * log(1 + e^eta)), enumerated for
/// EdgeTriangle.
double log_normalizer(const ModelSpec& spec, const ParamVector& theta, NodeId n);

/// Always by enumeration, for every family.
double log_normalizer_enumerated(const ModelSpec& spec, const ParamVector& theta, NodeId n);

StatsVector expected_stats(const ModelSpec& spec, const ParamVector& theta, NodeId n);

/// Var_theta[s(G)]; analytic for Bernoulli families.
Eigen::MatrixXd fisher_information(const ModelSpec& spec, const ParamVector& theta, NodeId n);

// ---------------------------------------------------------------------------
// Probability tables
// ---------------------------------------------------------------------------

/// Linear probabilities indexed by graph_to_index on n nodes.
struct ProbabilityTable {
  NodeId n = 1;
  std::vector<double> probs;
};

/// Full log-probability table over every graph on n nodes.
class ExactDistribution {
 public:
  ExactDistribution(ModelSpec spec, ParamVector theta, NodeId n, std::vector<double> log_probs,
                    double log_z);

  const ModelSpec& spec() const { return spec_; }
  const ParamVector& theta() const { return theta_; }
  NodeId n() const { return n_; }
  double log_z() const { return log_z_; }
  std::span<const double> log_probs() const { return log_probs_; }
  std::uint64_t size() const { return log_probs_.size(); }

  ProbabilityTable probabilities() const;

 private:
  ModelSpec spec_;
  ParamVector theta_;
  NodeId n_;
  std::vector<double> log_probs_;
  double log_z_;
};

ExactDistribution build_distribution(const ModelSpec& spec, const ParamVector& theta, NodeId n);

/// Plug-in route: log weights log_weight(g) for every graph on n nodes, in
/// index order. Lets new statistics be enumerated without touching the models.
std::vector<double> enumerate_log_weights(NodeId n,
                                          const std::function<double(const Graph&)>& log_weight);

/// Distribution of the subgraph induced by s.
ProbabilityTable marginal_distribution(const ExactDistribution& d, const NodeSubset& s);

/// Half the L1 distance between two equal-length probability vectors.
double tv_distance(std::span<const double> p, std::span<const double> q);

// ---------------------------------------------------------------------------
// Projectivity
// ---------------------------------------------------------------------------

/// max_tv at or below this declares the model projective on the grid.
inline constexpr double kProjectivityTolerance = 1e-9;

enum class ProjectivityVerdict { ProjectiveOnGrid, NonProjective };

std::string_view verdict_name(ProjectivityVerdict v);

struct ProjectivityReport {
  ModelSpec spec;
  NodeId n = 1;
  NodeId n_sub = 1;
  std::vector<ParamVector> theta_grid;
  std::vector<double> tv_per_theta;
  std::vector<bool> param_equal_per_theta;
  bool param_equal = true;
  double max_tv = 0.0;
  ProjectivityVerdict verdict = ProjectivityVerdict::ProjectiveOnGrid;
};

/// {-2, -1, 0, 1, 2} per component (product grid for stat_dim 2).
std::vector<ParamVector> default_theta_grid(const ModelSpec& spec);

/// Compares the marginal of the n-node model on {0, ..., n_sub-1} with the
/// n_sub-node model, for every theta on the grid.
ProjectivityReport projectivity_check(const ModelSpec& spec,
                                      const std::vector<ParamVector>& theta_grid, NodeId n,
                                      NodeId n_sub);

/// Same check against an arbitrary node subset of the n-node model.
ProjectivityReport projectivity_check(const ModelSpec& spec,
                                      const std::vector<ParamVector>& theta_grid,
                                      const NodeSubset& subset);

/// CSV: `theta_0[,theta_1],tv,param_equal` rows, then `max_tv,verdict`.
void write_projectivity_csv(std::ostream& out, const ProjectivityReport& report);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Inverse-CDF draw over the table (one uniform per draw).
Graph exact_sample(const ExactDistribution& d, RandomStream& rng);

/// Precomputed cumulative table for repeated draws. Produces the same draws
/// as exact_sample for the same stream.
class ExactSampler {
 public:
  explicit ExactSampler(const ExactDistribution& d);
  Graph operator()(RandomStream& rng) const;
  std::uint64_t draw_index(RandomStream& rng) const;

 private:
  NodeId n_;
  std::vector<double> cdf_;
};

/// Each dyad present independently with probability pi (one uniform per dyad,
/// in dyad-index order).
Graph sample_bernoulli(NodeId n, double pi, RandomStream& rng);

}  // namespace projgraph

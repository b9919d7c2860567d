#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "projgraph/graph.hpp"
#include "projgraph/models.hpp"

namespace projgraph {

struct FullGraph {
  Graph graph;
};

/// Subgraph induced by the observed nodes of a population of population_n
/// nodes. Observed nodes are identified with population nodes 0..n'-1; all
/// shipped models are exchangeable so the labelling does not matter.
struct InducedSubgraph {
  Graph y_sub;
  NodeId population_n = 1;
};

/// Independent graphs of a common size.
struct Replicates {
  std::vector<Graph> graphs;
};

using ObservedData = std::variant<FullGraph, InducedSubgraph, Replicates>;

/// Throws InvalidArgument when the variant's invariants do not hold.
void validate_data(const ObservedData& data);

enum class LikelihoodKind { Proper, Misspecified };

std::string_view kind_name(LikelihoodKind k);
LikelihoodKind parse_kind(std::string_view name);

struct MLEResult {
  ParamVector theta_hat;
  std::optional<Eigen::VectorXd> std_err;
  double log_lik = 0.0;
  bool converged = false;
  int iterations = 0;
  bool boundary = false;
};

/// log of the sum of P_{N, eta(theta, N)}(g) over every N-node graph g whose
/// subgraph on nodes 0..n'-1 is y_sub. Analytic for Bernoulli families;
/// completion enumeration for EdgeTriangle.
double proper_log_likelihood(const ModelSpec& spec, const ParamVector& theta, const Graph& y_sub,
                             NodeId population_n);

/// log P_{n', eta(theta, n')}(y_sub): the subgraph treated as if it were the
/// whole network.
double misspecified_log_likelihood(const ModelSpec& spec, const ParamVector& theta,
                                   const Graph& y_sub);

/// Log likelihood of the data; Misspecified requires InducedSubgraph data.
double log_likelihood(const ModelSpec& spec, const ParamVector& theta, const ObservedData& data,
                      LikelihoodKind kind);

/// Value, gradient and Hessian of a log likelihood at theta.
struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Log likelihood with analytic derivatives. `residual_scale` converts the
/// gradient into a per-graph moment residual (1/R for R replicates).
struct Objective {
  std::function<ObjectiveValue(const ParamVector&)> evaluate;
  int dim = 1;
  double residual_scale = 1.0;
};

Objective make_objective(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind);

struct NewtonOptions {
  double tolerance = 1e-10;  // infinity norm of the scaled gradient
  int max_iterations = 100;
  double divergence_bound = 40.0;  // |theta|_inf beyond this is treated as divergence
};

/// Damped Newton ascent from theta = 0 with step halving. Saddle directions
/// are handled by flipping negative curvature. Reports boundary=true when the
/// iterates run off to infinity.
MLEResult newton_maximize(const Objective& objective, const NewtonOptions& options = {});

/// True when the observed sufficient statistics admit no finite MLE.
bool is_boundary(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind);

/// Maximum likelihood estimate. Closed forms for Bernoulli families, Newton
/// otherwise. Standard errors from the inverse (expected or observed)
/// information; absent on the boundary.
MLEResult mle(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind,
              const NewtonOptions& options = {});

/// Newton path for every family, including Bernoulli (checks the closed forms).
MLEResult mle_newton(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind,
                     const NewtonOptions& options = {});

/// Header `family,kind,theta_hat_0..,std_err_0..,log_lik,converged,boundary,iterations`.
void write_mle_csv_header(std::ostream& out, int dim);
void write_mle_csv_row(std::ostream& out, const ModelSpec& spec, LikelihoodKind kind,
                       const MLEResult& result);

}  // namespace projgraph

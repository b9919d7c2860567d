#include "projgraph/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "enumeration.hpp"
#include "projgraph/errors.hpp"
#include "projgraph/exact.hpp"
#include "projgraph/numeric.hpp"
#include "projgraph/parallel.hpp"

namespace projgraph {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Stats histogram of all completions of y_sub (placed on nodes 0..n'-1) to
// graphs on population_n nodes. Free dyads are exactly the high bits of the
// population index because dyads are ordered column-major.
struct CompletionHistogram {
  Eigen::MatrixXd points;
  Eigen::VectorXd log_counts;
};

CompletionHistogram completion_histogram(const Graph& y_sub, NodeId population_n) {
  require_enumerable(population_n);
  const std::uint64_t base = graph_to_index(y_sub);
  const std::uint64_t observed = dyad_count(y_sub.n());
  const std::uint64_t d = dyad_count(population_n);
  const std::uint64_t t_max =
      static_cast<std::uint64_t>(population_n) * (population_n - 1) * (population_n - 2) / 6;
  const std::size_t cells = (d + 1) * (t_max + 1);
  const std::uint64_t free_count = std::uint64_t{1} << (d - observed);

  constexpr std::size_t kChunk = std::size_t{1} << 12;
  const std::size_t n_chunks = (free_count + kChunk - 1) / kChunk;
  std::vector<std::vector<std::uint64_t>> partial(n_chunks);
  parallel_chunks(free_count, kChunk, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint64_t> local(cells, 0);
    for (std::uint64_t f = b; f < e; ++f) {
      const std::uint64_t k = base | (f << observed);
      ++local[detail::index_triangles(k) * (d + 1) + detail::index_edges(k)];
    }
    partial[b / kChunk] = std::move(local);
  });
  std::vector<std::uint64_t> counts(cells, 0);
  for (const auto& local : partial)
    for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];

  const auto m = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  CompletionHistogram h{Eigen::MatrixXd(2, m), Eigen::VectorXd(m)};
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (counts[c] == 0) continue;
    h.points(0, col) = static_cast<double>(c % (d + 1));
    h.points(1, col) = static_cast<double>(c / (d + 1));
    h.log_counts(col) = std::log(static_cast<double>(counts[c]));
    ++col;
  }
  return h;
}

void check_subgraph(const Graph& y_sub, NodeId population_n) {
  if (y_sub.n() >= population_n)
    throw InvalidArgument("size mismatch: observed subgraph has " + std::to_string(y_sub.n()) +
                          " nodes, population must be larger (population_n=" +
                          std::to_string(population_n) + ")");
}

// theta-derivatives coincide with eta-derivatives: every shipped map
// eta(theta, n) is theta plus a constant.
Objective exp_family_objective(const ModelSpec& spec, NodeId n, Eigen::VectorXd total_stats,
                               double replicates) {
  Objective obj;
  obj.dim = spec.stat_dim();
  obj.residual_scale = 1.0 / replicates;
  if (spec.is_bernoulli()) {
    const double d = static_cast<double>(dyad_count(n));
    obj.evaluate = [spec, n, total_stats, replicates, d](const ParamVector& theta) {
      const double eta = natural_params(spec, theta, n).eta(0);
      const double pi = logistic(eta);
      ObjectiveValue v;
      v.value = eta * total_stats(0) - replicates * d * softplus(eta);
      v.gradient = Eigen::VectorXd::Constant(1, total_stats(0) - replicates * d * pi);
      v.hessian = Eigen::MatrixXd::Constant(1, 1, -replicates * d * pi * (1.0 - pi));
      return v;
    };
    return obj;
  }
  const StatHistogram* h = &stat_histogram(spec, n);
  obj.evaluate = [spec, n, total_stats, replicates, h](const ParamVector& theta) {
    const auto eta = natural_params(spec, theta, n).eta;
    const auto m = histogram_moments(h->points, h->log_counts, eta);
    ObjectiveValue v;
    v.value = eta.dot(total_stats) - replicates * m.log_z;
    v.gradient = total_stats - replicates * m.mean;
    v.hessian = -replicates * m.cov;
    return v;
  };
  return obj;
}

Objective proper_subgraph_objective(const ModelSpec& spec, const Graph& y_sub,
                                    NodeId population_n) {
  check_subgraph(y_sub, population_n);
  Objective obj;
  obj.dim = spec.stat_dim();
  if (spec.is_bernoulli()) {
    const double m = static_cast<double>(edge_count(y_sub));
    const double d = static_cast<double>(y_sub.dyads());
    obj.evaluate = [spec, population_n, m, d](const ParamVector& theta) {
      const double eta = natural_params(spec, theta, population_n).eta(0);
      const double pi = logistic(eta);
      ObjectiveValue v;
      v.value = m * log_logistic(eta) + (d - m) * log_logistic(-eta);
      v.gradient = Eigen::VectorXd::Constant(1, m - d * pi);
      v.hessian = Eigen::MatrixXd::Constant(1, 1, -d * pi * (1.0 - pi));
      return v;
    };
    return obj;
  }
  auto completions = std::make_shared<CompletionHistogram>(completion_histogram(y_sub, population_n));
  const StatHistogram* h = &stat_histogram(spec, population_n);
  obj.evaluate = [spec, population_n, completions, h](const ParamVector& theta) {
    const auto eta = natural_params(spec, theta, population_n).eta;
    const auto cond = histogram_moments(completions->points, completions->log_counts, eta);
    const auto full = histogram_moments(h->points, h->log_counts, eta);
    ObjectiveValue v;
    v.value = cond.log_z - full.log_z;
    v.gradient = cond.mean - full.mean;
    v.hessian = cond.cov - full.cov;
    return v;
  };
  return obj;
}

Eigen::VectorXd total_stats(const ModelSpec& spec, const std::vector<Graph>& graphs) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(spec.stat_dim());
  for (const auto& g : graphs) s += sufficient_stats(spec, g);
  return s;
}

// Convex hull (counter-clockwise, no collinear vertices) of integer points.
std::vector<std::array<long long, 2>> convex_hull(const Eigen::MatrixXd& points) {
  std::vector<std::array<long long, 2>> p;
  for (Eigen::Index c = 0; c < points.cols(); ++c)
    p.push_back({std::llround(points(0, c)), std::llround(points(1, c))});
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<long long, 2>> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Is total/replicates strictly inside the convex hull of attainable stats?
bool strictly_interior(const ModelSpec& spec, NodeId n, const Eigen::VectorXd& total,
                       long long replicates) {
  const auto& h = stat_histogram(spec, n);
  const auto hull = convex_hull(h.points);
  if (hull.size() < 3) return false;
  const long long sx = std::llround(total(0)), sy = std::llround(total(1));
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const long long c = (b[0] - a[0]) * (sy - replicates * a[1]) -
                        (b[1] - a[1]) * (sx - replicates * a[0]);
    if (c <= 0) return false;
  }
  return true;
}

struct BernoulliCounts {
  double edges = 0.0;
  double dyads = 0.0;
  NodeId n_eval = 1;  // size at which eta maps back to theta
};

BernoulliCounts bernoulli_counts(const ObservedData& data, LikelihoodKind kind) {
  return std::visit(
      Overloaded{
          [](const FullGraph& d) {
            return BernoulliCounts{static_cast<double>(edge_count(d.graph)),
                                   static_cast<double>(d.graph.dyads()), d.graph.n()};
          },
          [kind](const InducedSubgraph& d) {
            return BernoulliCounts{static_cast<double>(edge_count(d.y_sub)),
                                   static_cast<double>(d.y_sub.dyads()),
                                   kind == LikelihoodKind::Proper ? d.population_n : d.y_sub.n()};
          },
          [](const Replicates& d) {
            BernoulliCounts c{0.0, 0.0, d.graphs.front().n()};
            for (const auto& g : d.graphs) {
              c.edges += static_cast<double>(edge_count(g));
              c.dyads += static_cast<double>(g.dyads());
            }
            return c;
          }},
      data);
}

void check_kind(const ObservedData& data, LikelihoodKind kind) {
  validate_data(data);
  if (kind == LikelihoodKind::Misspecified && !std::holds_alternative<InducedSubgraph>(data))
    throw InvalidArgument("misspecified likelihood applies only to induced-subgraph data");
}

bool uses_observed_information(const ModelSpec& spec, const ObservedData& data,
                               LikelihoodKind kind) {
  return !spec.is_bernoulli() && kind == LikelihoodKind::Proper &&
         std::holds_alternative<InducedSubgraph>(data);
}

// Central finite-difference Hessian of the objective value.
Eigen::MatrixXd fd_hessian(const Objective& obj, const ParamVector& theta, double h) {
  const int d = obj.dim;
  Eigen::MatrixXd hess(d, d);
  auto f = [&](const ParamVector& t) { return obj.evaluate(t).value; };
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      ParamVector ei = ParamVector::Zero(d), ej = ParamVector::Zero(d);
      ei(i) = h;
      ej(j) = h;
      const double v = (f(theta + ei + ej) - f(theta + ei - ej) - f(theta - ei + ej) +
                        f(theta - ei - ej)) /
                       (4.0 * h * h);
      hess(i, j) = hess(j, i) = v;
    }
  }
  return hess;
}

std::optional<Eigen::VectorXd> standard_errors(const Eigen::MatrixXd& information) {
  Eigen::LLT<Eigen::MatrixXd> llt(information);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(information.rows(), information.cols()));
  if (!cov.allFinite() || (cov.diagonal().array() <= 0.0).any()) return std::nullopt;
  return cov.diagonal().cwiseSqrt();
}

MLEResult boundary_result(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind) {
  MLEResult r;
  r.boundary = true;
  r.converged = false;
  r.log_lik = kNaN;
  r.theta_hat = ParamVector::Constant(spec.stat_dim(), kNaN);
  if (spec.is_bernoulli()) {
    const auto c = bernoulli_counts(data, kind);
    r.theta_hat(0) = c.edges == 0.0 ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
  }
  return r;
}

constexpr double kFlatCurvature = 1e-6;

void attach_standard_errors(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind,
                            const Objective& obj, MLEResult& r) {
  if (r.boundary || !r.theta_hat.allFinite()) return;
  const Eigen::MatrixXd info = uses_observed_information(spec, data, kind)
                                   ? Eigen::MatrixXd(-fd_hessian(obj, r.theta_hat, 1e-4))
                                   : Eigen::MatrixXd(-obj.evaluate(r.theta_hat).hessian);
  r.std_err = standard_errors(info);
}

}  // namespace

void validate_data(const ObservedData& data) {
  std::visit(Overloaded{[](const FullGraph&) {},
                        [](const InducedSubgraph& d) { check_subgraph(d.y_sub, d.population_n); },
                        [](const Replicates& d) {
                          if (d.graphs.empty())
                            throw InvalidArgument("replicates: need at least one graph");
                          for (const auto& g : d.graphs)
                            if (g.n() != d.graphs.front().n())
                              throw InvalidArgument("replicates: all graphs must have the same size");
                        }},
             data);
}

std::string_view kind_name(LikelihoodKind k) {
  return k == LikelihoodKind::Proper ? "proper" : "misspecified";
}

LikelihoodKind parse_kind(std::string_view name) {
  if (name == "proper") return LikelihoodKind::Proper;
  if (name == "misspecified") return LikelihoodKind::Misspecified;
  throw InvalidArgument("unknown likelihood kind '" + std::string(name) +
                        "' (expected proper or misspecified)");
}

double proper_log_likelihood(const ModelSpec& spec, const ParamVector& theta, const Graph& y_sub,
                             NodeId population_n) {
  check_subgraph(y_sub, population_n);
  validate_theta(spec, theta);
  if (spec.is_bernoulli()) {
    const double eta = natural_params(spec, theta, population_n).eta(0);
    const double m = static_cast<double>(edge_count(y_sub));
    const double d = static_cast<double>(y_sub.dyads());
    return m * log_logistic(eta) + (d - m) * log_logistic(-eta);
  }
  const auto eta = natural_params(spec, theta, population_n).eta;
  const auto completions = completion_histogram(y_sub, population_n);
  const double log_numerator =
      logsumexp(Eigen::VectorXd(completions.log_counts + completions.points.transpose() * eta));
  return log_numerator - log_normalizer(spec, theta, population_n);
}

double misspecified_log_likelihood(const ModelSpec& spec, const ParamVector& theta,
                                   const Graph& y_sub) {
  validate_theta(spec, theta);
  const NodeId n = y_sub.n();
  if (spec.is_bernoulli()) {
    const double eta = natural_params(spec, theta, n).eta(0);
    const double m = static_cast<double>(edge_count(y_sub));
    const double d = static_cast<double>(y_sub.dyads());
    return m * log_logistic(eta) + (d - m) * log_logistic(-eta);
  }
  return log_unnormalized(spec, theta, n, y_sub) - log_normalizer(spec, theta, n);
}

double log_likelihood(const ModelSpec& spec, const ParamVector& theta, const ObservedData& data,
                      LikelihoodKind kind) {
  check_kind(data, kind);
  return std::visit(
      Overloaded{
          [&](const FullGraph& d) { return misspecified_log_likelihood(spec, theta, d.graph); },
          [&](const InducedSubgraph& d) {
            return kind == LikelihoodKind::Proper
                       ? proper_log_likelihood(spec, theta, d.y_sub, d.population_n)
                       : misspecified_log_likelihood(spec, theta, d.y_sub);
          },
          [&](const Replicates& d) {
            double total = 0.0;
            for (const auto& g : d.graphs) total += misspecified_log_likelihood(spec, theta, g);
            return total;
          }},
      data);
}

Objective make_objective(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind) {
  check_kind(data, kind);
  return std::visit(
      Overloaded{
          [&](const FullGraph& d) {
            return exp_family_objective(spec, d.graph.n(), sufficient_stats(spec, d.graph), 1.0);
          },
          [&](const InducedSubgraph& d) {
            if (kind == LikelihoodKind::Proper)
              return proper_subgraph_objective(spec, d.y_sub, d.population_n);
            return exp_family_objective(spec, d.y_sub.n(), sufficient_stats(spec, d.y_sub), 1.0);
          },
          [&](const Replicates& d) {
            return exp_family_objective(spec, d.graphs.front().n(), total_stats(spec, d.graphs),
                                        static_cast<double>(d.graphs.size()));
          }},
      data);
}

MLEResult newton_maximize(const Objective& objective, const NewtonOptions& options) {
  ParamVector theta = ParamVector::Zero(objective.dim);
  ObjectiveValue current = objective.evaluate(theta);
  MLEResult r;
  auto residual = [&](const ObjectiveValue& v) {
    return v.gradient.cwiseAbs().maxCoeff() * objective.residual_scale;
  };

  for (;;) {
    if (residual(current) <= options.tolerance) {
      r.converged = true;
      break;
    }
    if (r.iterations >= options.max_iterations) break;

    // Newton direction with |eigenvalues| of the negative Hessian, so the
    // step is an ascent direction even where the objective is not concave.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-current.hessian);
    Eigen::VectorXd lambda = eig.eigenvalues().cwiseAbs();
    const double floor = 1e-10 * std::max(1.0, lambda.maxCoeff());
    lambda = lambda.cwiseMax(floor);
    const Eigen::VectorXd direction = eig.eigenvectors() *
                                      (eig.eigenvectors().transpose() * current.gradient)
                                          .cwiseQuotient(lambda);

    bool accepted = false;
    double step = 1.0;
    ObjectiveValue trial;
    ParamVector candidate;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      candidate = theta + step * direction;
      trial = objective.evaluate(candidate);
      if (!std::isfinite(trial.value)) continue;
      const double slack = 1e-12 * (1.0 + std::abs(current.value));
      if (trial.value > current.value ||
          (trial.value >= current.value - slack && residual(trial) < residual(current))) {
        accepted = true;
        break;
      }
    }
    ++r.iterations;
    if (!accepted) break;
    theta = candidate;
    current = std::move(trial);
    if (theta.cwiseAbs().maxCoeff() > options.divergence_bound) {
      r.boundary = true;
      break;
    }
  }
  r.theta_hat = theta;
  r.log_lik = current.value;
  if (r.boundary) {
    r.converged = false;
    r.log_lik = kNaN;
  }
  return r;
}

bool is_boundary(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind) {
  check_kind(data, kind);
  if (spec.is_bernoulli()) {
    const auto c = bernoulli_counts(data, kind);
    return c.edges == 0.0 || c.edges == c.dyads;
  }
  return std::visit(
      Overloaded{
          [&](const FullGraph& d) {
            return !strictly_interior(spec, d.graph.n(), sufficient_stats(spec, d.graph), 1);
          },
          [&](const InducedSubgraph& d) {
            if (kind == LikelihoodKind::Misspecified)
              return !strictly_interior(spec, d.y_sub.n(), sufficient_stats(spec, d.y_sub), 1);
            const auto m = edge_count(d.y_sub);
            return m == 0 || m == d.y_sub.dyads();
          },
          [&](const Replicates& d) {
            return !strictly_interior(spec, d.graphs.front().n(), total_stats(spec, d.graphs),
                                      static_cast<long long>(d.graphs.size()));
          }},
      data);
}

MLEResult mle_newton(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind,
                     const NewtonOptions& options) {
  if (is_boundary(spec, data, kind)) return boundary_result(spec, data, kind);
  const Objective obj = make_objective(spec, data, kind);
  MLEResult r = newton_maximize(obj, options);
  attach_standard_errors(spec, data, kind, obj, r);
  // A subgraph likelihood can have its supremum at infinity even when the observed
  // statistics are interior; Newton then stalls on an exponentially flat ridge.
  // Flat curvature at the stopping point means no finite maximizer.
  if (!r.boundary && uses_observed_information(spec, data, kind)) {
    const Eigen::MatrixXd info = -fd_hessian(obj, r.theta_hat, 1e-4);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info, Eigen::EigenvaluesOnly);
    if (!r.std_err || eig.eigenvalues().minCoeff() < kFlatCurvature) {
      const double sup = r.log_lik;
      r = boundary_result(spec, data, kind);
      r.log_lik = sup;
    }
  }
  return r;
}

MLEResult mle(const ModelSpec& spec, const ObservedData& data, LikelihoodKind kind,
              const NewtonOptions& options) {
  if (!spec.is_bernoulli()) return mle_newton(spec, data, kind, options);
  if (is_boundary(spec, data, kind)) return boundary_result(spec, data, kind);

  const auto c = bernoulli_counts(data, kind);
  const double eta_hat = std::log(c.edges) - std::log(c.dyads - c.edges);
  MLEResult r;
  r.theta_hat = ParamVector::Constant(
      1, spec.offset_edges() ? eta_hat + std::log(static_cast<double>(c.n_eval)) : eta_hat);
  r.converged = true;
  r.iterations = 0;
  const Objective obj = make_objective(spec, data, kind);
  r.log_lik = obj.evaluate(r.theta_hat).value;
  attach_standard_errors(spec, data, kind, obj, r);
  return r;
}

namespace {
std::string csv_number(double v) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{}", v);
}
}  // namespace

void write_mle_csv_header(std::ostream& out, int dim) {
  out << "family,kind";
  for (int c = 0; c < dim; ++c) out << ",theta_hat_" << c;
  for (int c = 0; c < dim; ++c) out << ",std_err_" << c;
  out << ",log_lik,converged,boundary,iterations\n";
}

void write_mle_csv_row(std::ostream& out, const ModelSpec& spec, LikelihoodKind kind,
                       const MLEResult& result) {
  out << family_name(spec.family) << ',' << kind_name(kind);
  for (Eigen::Index c = 0; c < result.theta_hat.size(); ++c)
    out << ',' << csv_number(result.theta_hat(c));
  for (int c = 0; c < spec.stat_dim(); ++c)
    out << ',' << (result.std_err ? csv_number((*result.std_err)(c)) : std::string("NA"));
  out << ',' << csv_number(result.log_lik) << ',' << (result.converged ? "true" : "false") << ','
      << (result.boundary ? "true" : "false") << ',' << result.iterations << '\n';
}

}  // namespace projgraph

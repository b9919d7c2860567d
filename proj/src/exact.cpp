#include "projgraph/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include <fmt/format.h>

#include "enumeration.hpp"
#include "projgraph/errors.hpp"
#include "projgraph/numeric.hpp"
#include "projgraph/parallel.hpp"

namespace projgraph {

namespace {

std::atomic<NodeId> g_enumeration_cap{kDefaultEnumerationCap};

constexpr std::size_t kChunk = std::size_t{1} << 14;

std::uint64_t table_size(NodeId n) { return std::uint64_t{1} << dyad_count(n); }

}  // namespace

void set_enumeration_cap(NodeId cap) {
  if (cap == 0) throw InvalidArgument("enumeration cap must be >= 1");
  if (cap > kMaxEnumerationCap)
    throw EnumerationCapExceeded("too-large-for-enumeration: cap " + std::to_string(cap) +
                                 " exceeds the hard limit n <= " +
                                 std::to_string(kMaxEnumerationCap));
  g_enumeration_cap.store(cap);
}

NodeId enumeration_cap() { return g_enumeration_cap.load(); }

void require_enumerable(NodeId n) {
  if (n == 0) throw InvalidArgument("node count must be >= 1");
  if (n > enumeration_cap())
    throw EnumerationCapExceeded("too-large-for-enumeration: n=" + std::to_string(n) +
                                 " exceeds the enumeration cap n <= " +
                                 std::to_string(enumeration_cap()));
}

// ---------------------------------------------------------------------------

const StatHistogram& stat_histogram(const ModelSpec& spec, NodeId n) {
  require_enumerable(n);
  static std::mutex mutex;
  static std::map<std::pair<bool, NodeId>, std::unique_ptr<StatHistogram>> cache;

  const bool triangles = spec.family == Family::EdgeTriangle;
  std::lock_guard lock(mutex);
  auto& slot = cache[{triangles, n}];
  if (slot) return *slot;

  const std::uint64_t d = dyad_count(n);
  const std::uint64_t t_max = triangles ? static_cast<std::uint64_t>(n) * (n - 1) * (n - 2) / 6 : 0;
  const std::size_t cells = (d + 1) * (t_max + 1);
  const std::uint64_t total = table_size(n);
  const std::size_t n_chunks = (total + kChunk - 1) / kChunk;

  std::vector<std::vector<std::uint64_t>> partial(n_chunks);
  parallel_chunks(total, kChunk, [&](std::size_t b, std::size_t e) {
    std::vector<std::uint64_t> local(cells, 0);
    for (std::uint64_t k = b; k < e; ++k) {
      const std::uint64_t t = triangles ? detail::index_triangles(k) : 0;
      ++local[t * (d + 1) + detail::index_edges(k)];
    }
    partial[b / kChunk] = std::move(local);
  });
  std::vector<std::uint64_t> counts(cells, 0);
  for (const auto& local : partial)
    for (std::size_t c = 0; c < cells; ++c) counts[c] += local[c];

  auto h = std::make_unique<StatHistogram>();
  h->n = n;
  const int dim = spec.stat_dim();
  const auto m = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  h->points.resize(dim, m);
  h->log_counts.resize(m);
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (counts[c] == 0) continue;
    h->points(0, col) = static_cast<double>(c % (d + 1));
    if (triangles) h->points(1, col) = static_cast<double>(c / (d + 1));
    h->log_counts(col) = std::log(static_cast<double>(counts[c]));
    h->counts.push_back(counts[c]);
    ++col;
  }
  slot = std::move(h);
  return *slot;
}

StatMoments histogram_moments(const Eigen::MatrixXd& points, const Eigen::VectorXd& log_counts,
                              const Eigen::VectorXd& eta) {
  const Eigen::VectorXd a = log_counts + points.transpose() * eta;
  StatMoments m;
  m.log_z = logsumexp(a);
  const Eigen::VectorXd w = (a.array() - m.log_z).exp().matrix();
  m.mean = points * w;
  const Eigen::MatrixXd centered = points.colwise() - m.mean;
  m.cov = centered * w.asDiagonal() * centered.transpose();
  return m;
}

// ---------------------------------------------------------------------------

double log_normalizer(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  if (spec.is_bernoulli()) {
    const double eta = natural_params(spec, theta, n).eta(0);
    return static_cast<double>(dyad_count(n)) * softplus(eta);
  }
  return log_normalizer_enumerated(spec, theta, n);
}

double log_normalizer_enumerated(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  const auto eta = natural_params(spec, theta, n).eta;
  const auto& h = stat_histogram(spec, n);
  return logsumexp(Eigen::VectorXd(h.log_counts + h.points.transpose() * eta));
}

StatsVector expected_stats(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  if (spec.is_bernoulli()) {
    StatsVector s(1);
    s(0) = static_cast<double>(dyad_count(n)) * edge_prob(spec, theta, n);
    return s;
  }
  const auto& h = stat_histogram(spec, n);
  return histogram_moments(h.points, h.log_counts, natural_params(spec, theta, n).eta).mean;
}

Eigen::MatrixXd fisher_information(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  if (spec.is_bernoulli()) {
    const double pi = edge_prob(spec, theta, n);
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = static_cast<double>(dyad_count(n)) * pi * (1.0 - pi);
    return info;
  }
  const auto& h = stat_histogram(spec, n);
  return histogram_moments(h.points, h.log_counts, natural_params(spec, theta, n).eta).cov;
}

// ---------------------------------------------------------------------------

ExactDistribution::ExactDistribution(ModelSpec spec, ParamVector theta, NodeId n,
                                     std::vector<double> log_probs, double log_z)
    : spec_(spec), theta_(std::move(theta)), n_(n), log_probs_(std::move(log_probs)),
      log_z_(log_z) {}

ProbabilityTable ExactDistribution::probabilities() const {
  ProbabilityTable t{n_, std::vector<double>(log_probs_.size())};
  std::transform(log_probs_.begin(), log_probs_.end(), t.probs.begin(),
                 [](double lp) { return std::exp(lp); });
  return t;
}

ExactDistribution build_distribution(const ModelSpec& spec, const ParamVector& theta, NodeId n) {
  require_enumerable(n);
  const auto eta = natural_params(spec, theta, n).eta;
  const bool triangles = spec.family == Family::EdgeTriangle;
  const double eta_edges = eta(0);
  const double eta_triangles = triangles ? eta(1) : 0.0;

  std::vector<double> log_probs(table_size(n));
  parallel_chunks(log_probs.size(), kChunk, [&](std::size_t b, std::size_t e) {
    for (std::uint64_t k = b; k < e; ++k) {
      double v = eta_edges * detail::index_edges(k);
      if (triangles) v += eta_triangles * detail::index_triangles(k);
      log_probs[k] = v;
    }
  });
  const double log_z = logsumexp(std::span<const double>(log_probs));
  parallel_chunks(log_probs.size(), kChunk, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) log_probs[k] -= log_z;
  });
  return ExactDistribution(spec, theta, n, std::move(log_probs), log_z);
}

std::vector<double> enumerate_log_weights(
    NodeId n, const std::function<double(const Graph&)>& log_weight) {
  require_enumerable(n);
  std::vector<double> out(table_size(n));
  parallel_chunks(out.size(), kChunk, [&](std::size_t b, std::size_t e) {
    for (std::uint64_t k = b; k < e; ++k) out[k] = log_weight(graph_from_index(n, k));
  });
  return out;
}

ProbabilityTable marginal_distribution(const ExactDistribution& d, const NodeSubset& s) {
  if (s.parent_n() != d.n())
    throw InvalidArgument("invalid-subset: subset parent size " + std::to_string(s.parent_n()) +
                          " != distribution size " + std::to_string(d.n()));
  const std::uint64_t sub_dyads = dyad_count(s.size());
  std::vector<DyadIndex> parent_dyad(sub_dyads);
  for (DyadIndex t = 0; t < sub_dyads; ++t) {
    auto [a, b] = dyad_nodes(t);
    parent_dyad[t] = dyad_index(s.members()[a], s.members()[b]);
  }
  ProbabilityTable out{s.size(), std::vector<double>(table_size(s.size()), 0.0)};
  const auto lp = d.log_probs();
  for (std::uint64_t k = 0; k < lp.size(); ++k) {
    std::uint64_t sub = 0;
    for (DyadIndex t = 0; t < sub_dyads; ++t) sub |= ((k >> parent_dyad[t]) & 1u) << t;
    out.probs[sub] += std::exp(lp[k]);
  }
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidArgument("tv_distance: length mismatch (" + std::to_string(p.size()) + " vs " +
                          std::to_string(q.size()) + ")");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

std::string_view verdict_name(ProjectivityVerdict v) {
  return v == ProjectivityVerdict::ProjectiveOnGrid ? "projective-on-grid" : "non-projective";
}

std::vector<ParamVector> default_theta_grid(const ModelSpec& spec) {
  const double values[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<ParamVector> grid;
  if (spec.stat_dim() == 1) {
    for (double v : values) grid.push_back(ParamVector::Constant(1, v));
  } else {
    for (double a : values)
      for (double b : values) grid.push_back((ParamVector(2) << a, b).finished());
  }
  return grid;
}

ProjectivityReport projectivity_check(const ModelSpec& spec,
                                      const std::vector<ParamVector>& theta_grid, NodeId n,
                                      NodeId n_sub) {
  if (n_sub == 0 || n_sub >= n)
    throw InvalidArgument("projectivity check needs 1 <= n_sub < n (got n=" + std::to_string(n) +
                          ", n_sub=" + std::to_string(n_sub) + ")");
  return projectivity_check(spec, theta_grid, NodeSubset::prefix(n, n_sub));
}

ProjectivityReport projectivity_check(const ModelSpec& spec,
                                      const std::vector<ParamVector>& theta_grid,
                                      const NodeSubset& subset) {
  const NodeId n = subset.parent_n();
  const NodeId n_sub = subset.size();
  if (n_sub >= n) throw InvalidArgument("projectivity check needs a proper node subset");
  if (theta_grid.empty()) throw InvalidArgument("theta grid is empty");
  require_enumerable(n);
  for (const auto& theta : theta_grid) validate_theta(spec, theta);

  ProjectivityReport r;
  r.spec = spec;
  r.n = n;
  r.n_sub = n_sub;
  r.theta_grid = theta_grid;
  for (const auto& theta : theta_grid) {
    const auto marginal = marginal_distribution(build_distribution(spec, theta, n), subset);
    const auto direct = build_distribution(spec, theta, n_sub).probabilities();
    const double tv = tv_distance(marginal.probs, direct.probs);
    const bool eq = (natural_params(spec, theta, n_sub).eta.array() ==
                     natural_params(spec, theta, n).eta.array())
                        .all();
    r.tv_per_theta.push_back(tv);
    r.param_equal_per_theta.push_back(eq);
    r.param_equal = r.param_equal && eq;
    r.max_tv = std::max(r.max_tv, tv);
  }
  r.verdict = (r.max_tv > kProjectivityTolerance || !r.param_equal)
                  ? ProjectivityVerdict::NonProjective
                  : ProjectivityVerdict::ProjectiveOnGrid;
  return r;
}

void write_projectivity_csv(std::ostream& out, const ProjectivityReport& report) {
  const int dim = report.spec.stat_dim();
  for (int c = 0; c < dim; ++c) out << "theta_" << c << ',';
  out << "tv,param_equal\n";
  for (std::size_t i = 0; i < report.theta_grid.size(); ++i) {
    for (int c = 0; c < dim; ++c) out << fmt::format("{}", report.theta_grid[i](c)) << ',';
    out << fmt::format("{}", report.tv_per_theta[i]) << ','
        << (report.param_equal_per_theta[i] ? "true" : "false") << '\n';
  }
  out << "max_tv,verdict\n"
      << fmt::format("{}", report.max_tv) << ',' << verdict_name(report.verdict) << '\n';
}

// ---------------------------------------------------------------------------

Graph exact_sample(const ExactDistribution& d, RandomStream& rng) {
  const auto lp = d.log_probs();
  double total = 0.0;
  for (double v : lp) total += std::exp(v);
  const double u = rng.uniform() * total;
  double cum = 0.0;
  std::uint64_t pick = lp.size() - 1;
  for (std::uint64_t k = 0; k < lp.size(); ++k) {
    cum += std::exp(lp[k]);
    if (cum > u) {
      pick = k;
      break;
    }
  }
  return graph_from_index(d.n(), pick);
}

ExactSampler::ExactSampler(const ExactDistribution& d) : n_(d.n()), cdf_(d.size()) {
  double cum = 0.0;
  const auto lp = d.log_probs();
  for (std::uint64_t k = 0; k < lp.size(); ++k) cdf_[k] = cum += std::exp(lp[k]);
}

std::uint64_t ExactSampler::draw_index(RandomStream& rng) const {
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::uint64_t>(it - cdf_.begin());
}

Graph ExactSampler::operator()(RandomStream& rng) const {
  return graph_from_index(n_, draw_index(rng));
}

Graph sample_bernoulli(NodeId n, double pi, RandomStream& rng) {
  if (!(pi >= 0.0 && pi <= 1.0))
    throw InvalidArgument("edge probability must lie in [0, 1], got " + fmt::format("{}", pi));
  Graph g(n);
  const std::uint64_t d = g.dyads();
  for (DyadIndex k = 0; k < d; ++k)
    if (rng.uniform() < pi) g.set_dyad(k, true);
  return g;
}

}  // namespace projgraph

#include "projgraph/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "projgraph/errors.hpp"
#include "projgraph/exact.hpp"
#include "projgraph/inference.hpp"
#include "projgraph/parallel.hpp"
#include "projgraph/random.hpp"

#ifndef PROJGRAPH_VERSION
#define PROJGRAPH_VERSION "unknown"
#endif

namespace projgraph {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags; part of the published seed derivation.
constexpr std::uint64_t kGrowthTag = 1;
constexpr std::uint64_t kReplicationTag = 2;
constexpr std::uint64_t kSubsampleTag = 3;
constexpr std::uint64_t kThresholdTag = 4;

RandomStream replicate_stream(const ExperimentConfig& cfg, std::uint64_t tag, std::size_t cell,
                              std::size_t replicate) {
  return RandomStream::derive(cfg.master_seed, {tag, cell, replicate});
}

struct Summary {
  int used = 0;
  double mean = kNaN, bias = kNaN, rmse = kNaN, mc_se = kNaN;
};

Summary summarize(const std::vector<double>& estimates, double truth) {
  Summary s;
  s.used = static_cast<int>(estimates.size());
  if (estimates.empty()) return s;
  double sum = 0.0, sq = 0.0;
  for (double x : estimates) {
    sum += x;
    sq += (x - truth) * (x - truth);
  }
  s.mean = sum / s.used;
  s.bias = s.mean - truth;
  s.rmse = std::sqrt(sq / s.used);
  if (s.used > 1) {
    double var = 0.0;
    for (double x : estimates) var += (x - s.mean) * (x - s.mean);
    s.mc_se = std::sqrt(var / (s.used - 1) / s.used);
  }
  return s;
}

void fill_summary(ReportRow& row, const std::vector<double>& estimates, double truth) {
  const Summary s = summarize(estimates, truth);
  row.truth = truth;
  row.used = s.used;
  row.n_boundary = row.replicates - s.used;
  row.mean_estimate = s.mean;
  row.bias = s.bias;
  row.rmse = s.rmse;
  row.mc_se = s.mc_se;
}

// Uniform random k-subset of {0..n-1}, sorted (partial Fisher-Yates).
NodeSubset random_subset(NodeId n, NodeId k, RandomStream& rng) {
  std::vector<NodeId> pool(n);
  for (NodeId i = 0; i < n; ++i) pool[i] = i;
  for (NodeId i = 0; i < k; ++i) {
    const auto j = static_cast<NodeId>(i + rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return NodeSubset(n, std::move(pool));
}

// Growth, subsample and threshold studies use a single per-cell count.
int cell_replicates(const ExperimentConfig& cfg) { return cfg.replicates.front(); }

template <typename T>
std::vector<T> json_list(const nlohmann::json& j, const char* key) {
  if (j.is_array()) return j.get<std::vector<T>>();
  if (j.is_number()) return {j.get<T>()};
  throw InvalidArgument(std::string("config key '") + key + "' must be a number or an array");
}

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{}", v);
}

}  // namespace

std::string library_version() { return "projgraph " PROJGRAPH_VERSION; }

std::string_view experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Growth: return "growth";
    case ExperimentKind::Replication: return "replication";
    case ExperimentKind::Subsample: return "subsample";
    case ExperimentKind::Threshold: return "threshold";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::Growth, ExperimentKind::Replication, ExperimentKind::Subsample,
                 ExperimentKind::Threshold})
    if (experiment_name(k) == name) return k;
  throw InvalidArgument("config key 'experiment': unknown experiment '" + std::string(name) +
                        "' (expected growth, replication, subsample or threshold)");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known = {"experiment", "spec",           "theta_star",
                                              "sizes",      "replicates",     "studies",
                                              "subsample_n", "master_seed",   "multipliers"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw InvalidArgument("unknown config key '" + key + "'");
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing config key '") + key + "'");
    return j.at(key);
  };

  ExperimentConfig cfg;
  try {
    cfg.experiment = parse_experiment(require("experiment").get<std::string>());

    const auto& spec = require("spec");
    if (!spec.is_object()) throw InvalidArgument("config key 'spec' must be an object");
    for (const auto& [key, _] : spec.items())
      if (key != "family") throw InvalidArgument("unknown config key 'spec." + key + "'");
    if (!spec.contains("family")) throw InvalidArgument("missing config key 'spec.family'");
    cfg.spec.family = parse_family(spec.at("family").get<std::string>());

    if (cfg.experiment != ExperimentKind::Threshold) {
      const auto theta = json_list<double>(require("theta_star"), "theta_star");
      cfg.theta_star = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                         static_cast<Eigen::Index>(theta.size()));
    } else if (j.contains("theta_star")) {
      const auto theta = json_list<double>(j.at("theta_star"), "theta_star");
      cfg.theta_star = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                         static_cast<Eigen::Index>(theta.size()));
    }
    cfg.sizes = json_list<NodeId>(require("sizes"), "sizes");
    cfg.replicates = json_list<int>(require("replicates"), "replicates");
    if (j.contains("studies")) cfg.studies = j.at("studies").get<int>();
    if (j.contains("subsample_n")) cfg.subsample_n = j.at("subsample_n").get<NodeId>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("multipliers"))
      cfg.multipliers = json_list<double>(j.at("multipliers"), "multipliers");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config type error: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["spec"] = {{"family", family_name(cfg.spec.family)}};
  j["theta_star"] = std::vector<double>(cfg.theta_star.data(),
                                        cfg.theta_star.data() + cfg.theta_star.size());
  j["sizes"] = cfg.sizes;
  j["replicates"] = cfg.replicates;
  if (cfg.experiment == ExperimentKind::Replication) j["studies"] = cfg.studies;
  if (cfg.experiment == ExperimentKind::Subsample) j["subsample_n"] = cfg.subsample_n;
  j["master_seed"] = cfg.master_seed;
  if (cfg.experiment == ExperimentKind::Threshold) j["multipliers"] = cfg.multipliers;
  return j;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty()) throw InvalidArgument("config key 'sizes' must be non-empty");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] < 1) throw InvalidArgument("config key 'sizes': node counts must be >= 1");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])
      throw InvalidArgument("config key 'sizes' must be strictly increasing");
  }
  if (cfg.replicates.empty()) throw InvalidArgument("config key 'replicates' must be non-empty");
  for (int r : cfg.replicates)
    if (r < 1) throw InvalidArgument("config key 'replicates': counts must be >= 1");

  if (cfg.experiment != ExperimentKind::Threshold) validate_theta(cfg.spec, cfg.theta_star);

  switch (cfg.experiment) {
    case ExperimentKind::Growth:
      if (cfg.spec.family != Family::BernoulliOffset)
        throw InvalidArgument("growth study requires spec.family = bernoulli-offset");
      if (cfg.replicates.size() != 1)
        throw InvalidArgument("config key 'replicates' must be a single count for growth");
      break;
    case ExperimentKind::Replication:
      if (cfg.studies < 1) throw InvalidArgument("config key 'studies' must be >= 1");
      if (cfg.sizes.size() != 1)
        throw InvalidArgument("config key 'sizes' must hold exactly one size for replication");
      for (std::size_t i = 1; i < cfg.replicates.size(); ++i)
        if (cfg.replicates[i] <= cfg.replicates[i - 1])
          throw InvalidArgument("config key 'replicates' must be strictly increasing");
      if (!cfg.spec.is_bernoulli()) require_enumerable(cfg.sizes.front());
      break;
    case ExperimentKind::Subsample:
      if (cfg.replicates.size() != 1)
        throw InvalidArgument("config key 'replicates' must be a single count for subsample");
      if (cfg.subsample_n < 2)
        throw InvalidArgument("config key 'subsample_n' must be >= 2");
      if (cfg.subsample_n >= cfg.sizes.front())
        throw InvalidArgument("config key 'subsample_n' must be below every population size");
      if (!cfg.spec.is_bernoulli()) require_enumerable(cfg.sizes.back());
      break;
    case ExperimentKind::Threshold:
      if (cfg.replicates.size() != 1)
        throw InvalidArgument("config key 'replicates' must be a single count for threshold");
      if (cfg.multipliers.empty())
        throw InvalidArgument("config key 'multipliers' must be non-empty");
      for (double c : cfg.multipliers)
        if (!(c > 0.0) || !std::isfinite(c))
          throw InvalidArgument("config key 'multipliers': values must be finite and > 0");
      break;
  }
}

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

ExperimentReport run_growth_consistency(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.experiment != ExperimentKind::Growth)
    throw InvalidArgument("run_growth_consistency needs a growth config");
  ExperimentReport report{ExperimentKind::Growth, {}, {}, {}};
  const int reps = cell_replicates(cfg);
  const double truth = cfg.theta_star(0);

  for (std::size_t cell = 0; cell < cfg.sizes.size(); ++cell) {
    const NodeId n = cfg.sizes[cell];
    const double pi = edge_prob(cfg.spec, cfg.theta_star, n);
    std::vector<MLEResult> fits(reps);
    std::vector<double> degrees(reps), edges(reps);
    parallel_for(reps, [&](std::size_t r) {
      auto rng = replicate_stream(cfg, kGrowthTag, cell, r);
      const Graph g = sample_bernoulli(n, pi, rng);
      degrees[r] = mean_degree(g);
      edges[r] = static_cast<double>(edge_count(g));
      fits[r] = mle(cfg.spec, FullGraph{g}, LikelihoodKind::Proper);
    });

    std::vector<double> estimates;
    double degree_sum = 0.0, edge_sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      degree_sum += degrees[r];
      edge_sum += edges[r];
      if (!fits[r].boundary) estimates.push_back(fits[r].theta_hat(0));
      report.records.push_back({cell, static_cast<std::size_t>(r), "mle", fits[r].theta_hat,
                                fits[r].boundary, degrees[r]});
    }
    ReportRow row;
    row.cell = cell;
    row.n = n;
    row.estimator = "mle";
    row.edge_prob = pi;
    row.replicates = reps;
    fill_summary(row, estimates, truth);
    row.mean_degree = degree_sum / reps;
    row.mean_edges = edge_sum / reps;
    row.expected_edges = static_cast<double>(dyad_count(n)) * pi;
    report.rows.push_back(row);
  }
  return report;
}

ExperimentReport run_replication_consistency(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.experiment != ExperimentKind::Replication)
    throw InvalidArgument("run_replication_consistency needs a replication config");
  ExperimentReport report{ExperimentKind::Replication, {}, {}, {}};
  const NodeId n = cfg.sizes.front();
  const int dim = cfg.spec.stat_dim();

  std::optional<ExactSampler> sampler;
  double pi = 0.0;
  if (cfg.spec.is_bernoulli())
    pi = edge_prob(cfg.spec, cfg.theta_star, n);
  else
    sampler.emplace(build_distribution(cfg.spec, cfg.theta_star, n));

  for (std::size_t cell = 0; cell < cfg.replicates.size(); ++cell) {
    const int R = cfg.replicates[cell];
    std::vector<MLEResult> fits(cfg.studies);
    parallel_for(cfg.studies, [&](std::size_t s) {
      auto rng = replicate_stream(cfg, kReplicationTag, cell, s);
      Replicates data;
      data.graphs.reserve(R);
      for (int i = 0; i < R; ++i)
        data.graphs.push_back(sampler ? (*sampler)(rng) : sample_bernoulli(n, pi, rng));
      fits[s] = mle(cfg.spec, data, LikelihoodKind::Proper);
    });
    for (int s = 0; s < cfg.studies; ++s)
      report.records.push_back(
          {cell, static_cast<std::size_t>(s), "mle", fits[s].theta_hat, fits[s].boundary, 0.0});

    for (int c = 0; c < dim; ++c) {
      std::vector<double> estimates;
      for (const auto& f : fits)
        if (!f.boundary) estimates.push_back(f.theta_hat(c));
      ReportRow row;
      row.cell = cell;
      row.n = n;
      row.replicate_count = R;
      row.estimator = "mle";
      row.component = c;
      row.replicates = cfg.studies;
      fill_summary(row, estimates, cfg.theta_star(c));
      report.rows.push_back(row);
    }
  }
  return report;
}

ExperimentReport run_subsample_bias(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.experiment != ExperimentKind::Subsample)
    throw InvalidArgument("run_subsample_bias needs a subsample config");
  ExperimentReport report{ExperimentKind::Subsample, {}, {}, {}};
  const int reps = cell_replicates(cfg);
  const int dim = cfg.spec.stat_dim();
  const NodeId n_sub = cfg.subsample_n;

  for (std::size_t cell = 0; cell < cfg.sizes.size(); ++cell) {
    const NodeId population = cfg.sizes[cell];
    std::optional<ExactSampler> sampler;
    double pi = 0.0;
    if (cfg.spec.is_bernoulli())
      pi = edge_prob(cfg.spec, cfg.theta_star, population);
    else
      sampler.emplace(build_distribution(cfg.spec, cfg.theta_star, population));

    std::vector<MLEResult> proper(reps), misspecified(reps);
    parallel_for(reps, [&](std::size_t r) {
      auto rng = replicate_stream(cfg, kSubsampleTag, cell, r);
      const Graph g = sampler ? (*sampler)(rng) : sample_bernoulli(population, pi, rng);
      const Graph y = induced_subgraph(g, random_subset(population, n_sub, rng));
      const InducedSubgraph data{y, population};
      proper[r] = mle(cfg.spec, data, LikelihoodKind::Proper);
      misspecified[r] = mle(cfg.spec, data, LikelihoodKind::Misspecified);
    });

    for (auto [name, fits] : {std::pair{"proper", &proper}, std::pair{"misspecified", &misspecified}}) {
      for (int r = 0; r < reps; ++r)
        report.records.push_back({cell, static_cast<std::size_t>(r), name, (*fits)[r].theta_hat,
                                  (*fits)[r].boundary, 0.0});
      for (int c = 0; c < dim; ++c) {
        std::vector<double> estimates;
        for (const auto& f : *fits)
          if (!f.boundary) estimates.push_back(f.theta_hat(c));
        ReportRow row;
        row.cell = cell;
        row.n = population;
        row.estimator = name;
        row.component = c;
        row.replicates = reps;
        row.edge_prob = cfg.spec.is_bernoulli() ? pi : kNaN;
        fill_summary(row, estimates, cfg.theta_star(c));
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

ExperimentReport run_connectivity_threshold(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.experiment != ExperimentKind::Threshold)
    throw InvalidArgument("run_connectivity_threshold needs a threshold config");
  ExperimentReport report{ExperimentKind::Threshold, {}, {}, {}};
  const int reps = cell_replicates(cfg);

  std::size_t cell = 0;
  for (NodeId n : cfg.sizes) {
    for (double c : cfg.multipliers) {
      const double pi = std::min(1.0, c * std::log(static_cast<double>(n)) / n);
      std::vector<char> connected(reps);
      parallel_for(reps, [&](std::size_t r) {
        auto rng = replicate_stream(cfg, kThresholdTag, cell, r);
        connected[r] = is_connected(sample_bernoulli(n, pi, rng)) ? 1 : 0;
      });
      int hits = 0;
      for (int r = 0; r < reps; ++r) {
        hits += connected[r];
        report.records.push_back({cell, static_cast<std::size_t>(r), "connectivity",
                                  ParamVector(), false, static_cast<double>(connected[r])});
      }
      ReportRow row;
      row.cell = cell;
      row.n = n;
      row.estimator = "connectivity";
      row.multiplier = c;
      row.edge_prob = pi;
      row.replicates = reps;
      row.used = reps;
      row.prop_connected = static_cast<double>(hits) / reps;
      report.rows.push_back(row);
      ++cell;
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  switch (cfg.experiment) {
    case ExperimentKind::Growth: report = run_growth_consistency(cfg); break;
    case ExperimentKind::Replication: report = run_replication_consistency(cfg); break;
    case ExperimentKind::Subsample: report = run_subsample_bias(cfg); break;
    case ExperimentKind::Threshold: report = run_connectivity_threshold(cfg); break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto& meta = report.metadata;
  meta["config"] = to_json(cfg);
  meta["master_seed"] = cfg.master_seed;
  meta["seed_derivation"] =
      "stream key = mix64 chain over (master_seed, experiment tag, cell, replicate); "
      "tags growth=1 replication=2 subsample=3 threshold=4";
  meta["version"] = library_version();
  meta["runtime_seconds"] = seconds;
  meta["boundary_policy"] = "replicates without a finite MLE are excluded from bias/rmse and "
                            "counted in n_boundary";
  if (cfg.experiment == ExperimentKind::Subsample)
    meta["sampling_design"] = "uniform random node subset of size subsample_n (ignorable)";
  return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  switch (report.kind) {
    case ExperimentKind::Growth:
      out << "cell,n,edge_prob,replicates,used,n_boundary,truth,mean_estimate,bias,rmse,mc_se,"
             "mean_degree,mean_edges,expected_edges\n";
      for (const auto& r : report.rows)
        out << r.cell << ',' << r.n << ',' << num(r.edge_prob) << ',' << r.replicates << ','
            << r.used << ',' << r.n_boundary << ',' << num(r.truth) << ','
            << num(r.mean_estimate) << ',' << num(r.bias) << ',' << num(r.rmse) << ','
            << num(r.mc_se) << ',' << num(r.mean_degree) << ',' << num(r.mean_edges) << ','
            << num(r.expected_edges) << '\n';
      break;
    case ExperimentKind::Replication:
      out << "cell,n,R,component,studies,used,n_boundary,truth,mean_estimate,bias,rmse,mc_se\n";
      for (const auto& r : report.rows)
        out << r.cell << ',' << r.n << ',' << r.replicate_count << ',' << r.component << ','
            << r.replicates << ',' << r.used << ',' << r.n_boundary << ',' << num(r.truth) << ','
            << num(r.mean_estimate) << ',' << num(r.bias) << ',' << num(r.rmse) << ','
            << num(r.mc_se) << '\n';
      break;
    case ExperimentKind::Subsample:
      out << "cell,population_n,estimator,component,replicates,used,n_boundary,truth,"
             "mean_estimate,bias,rmse,mc_se\n";
      for (const auto& r : report.rows)
        out << r.cell << ',' << r.n << ',' << r.estimator << ',' << r.component << ','
            << r.replicates << ',' << r.used << ',' << r.n_boundary << ',' << num(r.truth) << ','
            << num(r.mean_estimate) << ',' << num(r.bias) << ',' << num(r.rmse) << ','
            << num(r.mc_se) << '\n';
      break;
    case ExperimentKind::Threshold:
      out << "cell,n,multiplier,edge_prob,replicates,prop_connected\n";
      for (const auto& r : report.rows)
        out << r.cell << ',' << r.n << ',' << num(r.multiplier) << ',' << num(r.edge_prob) << ','
            << r.replicates << ',' << num(r.prop_connected) << '\n';
      break;
  }
}

}  // namespace projgraph

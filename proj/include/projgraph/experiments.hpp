#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "projgraph/models.hpp"

namespace projgraph {

enum class ExperimentKind { Growth, Replication, Subsample, Threshold };

std::string_view experiment_name(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

/// Monte Carlo study configuration. JSON keys are the field names; `spec` is
/// an object `{"family": ...}`. `replicates` is per-cell for growth, subsample
/// and threshold studies and the list of replicate counts R for the
/// replication study, which repeats each R-cell `studies` times.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Growth;
  ModelSpec spec;
  ParamVector theta_star;
  std::vector<NodeId> sizes;
  std::vector<int> replicates;
  int studies = 200;
  NodeId subsample_n = 0;
  std::uint64_t master_seed = 1;
  std::vector<double> multipliers;
};

/// Strict parse: unknown keys, missing required keys and type errors throw
/// InvalidArgument naming the key.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

/// One summary row. Fields that do not apply to an experiment are NaN / 0.
struct ReportRow {
  std::size_t cell = 0;
  NodeId n = 0;             // graph size (population size for subsample)
  int replicate_count = 0;  // R for replication rows
  std::string estimator;    // "mle", "proper", "misspecified", "connectivity"
  int component = 0;
  double multiplier = 0.0;
  double edge_prob = 0.0;
  int replicates = 0;  // replicates (or studies) run in the cell
  int used = 0;        // replicates - n_boundary
  int n_boundary = 0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double mc_se = 0.0;  // Monte Carlo standard error of mean_estimate
  double mean_degree = 0.0;
  double mean_edges = 0.0;
  double expected_edges = 0.0;
  double prop_connected = 0.0;
};

/// Per-replicate outcome kept alongside the summary.
struct ReplicateRecord {
  std::size_t cell = 0;
  std::size_t replicate = 0;
  std::string estimator;
  ParamVector theta_hat;
  bool boundary = false;
  double statistic = 0.0;  // mean degree (growth), connected 0/1 (threshold)
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::Growth;
  std::vector<ReportRow> rows;
  std::vector<ReplicateRecord> records;
  nlohmann::json metadata;
};

ExperimentReport run_growth_consistency(const ExperimentConfig& cfg);
ExperimentReport run_replication_consistency(const ExperimentConfig& cfg);
ExperimentReport run_subsample_bias(const ExperimentConfig& cfg);
ExperimentReport run_connectivity_threshold(const ExperimentConfig& cfg);

/// Validates, dispatches on cfg.experiment and fills the metadata.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Report body; identical configs give byte-identical output.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

std::string library_version();

}  // namespace projgraph

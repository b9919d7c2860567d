// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance, band,
// seed and runtime limit is pinned here. Exit status is non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "cli.hpp"
#include "projgraph/exact.hpp"
#include "projgraph/experiments.hpp"
#include "projgraph/inference.hpp"
#include "projgraph/parallel.hpp"
#include "projgraph/random.hpp"

using namespace projgraph;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

ParamVector th(double a) { return ParamVector::Constant(1, a); }
ParamVector th(double a, double b) { return (ParamVector(2) << a, b).finished(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli_call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) row.push_back(c);
    rows.push_back(row);
  }
  return rows;
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(out, r);
  return out.str();
}

// Acceptance-sized configs.
json growth_config() {
  return {{"experiment", "growth"},      {"spec", {{"family", "bernoulli-offset"}}},
          {"theta_star", {1.0}},         {"sizes", {50, 100, 200, 400}},
          {"replicates", 500},           {"master_seed", kSeed}};
}
json subsample_config() {
  return {{"experiment", "subsample"}, {"spec", {{"family", "bernoulli-offset"}}},
          {"theta_star", {1.0}},       {"sizes", {200}},
          {"replicates", 500},         {"subsample_n", 50},
          {"master_seed", kSeed}};
}
json replication_bernoulli_config() {
  return {{"experiment", "replication"}, {"spec", {{"family", "bernoulli-offset"}}},
          {"theta_star", {1.0}},         {"sizes", {30}},
          {"replicates", {10, 40, 160}}, {"studies", 500},
          {"master_seed", kSeed}};
}
json replication_edge_triangle_config() {
  return {{"experiment", "replication"}, {"spec", {{"family", "edge-triangle"}}},
          {"theta_star", {0.0, 0.5}},    {"sizes", {5}},
          {"replicates", {10, 40, 160}}, {"studies", 500},
          {"master_seed", kSeed}};
}
json threshold_config() {
  return {{"experiment", "threshold"}, {"spec", {{"family", "bernoulli-invariant"}}},
          {"sizes", {200}},            {"replicates", 1000},
          {"multipliers", {0.5, 1.0, 2.0}}, {"master_seed", kSeed}};
}

// Shared by criteria 5 and 6.
const ExperimentReport& growth_report() {
  static const ExperimentReport report = run_experiment(parse_config(growth_config()));
  return report;
}

Outcome projectivity_ground_truth() {
  Outcome o;
  const std::vector<std::string> grid_flag = {"--grid-values", "-2,-1,0,1,2"};
  auto run_check = [&](const std::string& family, std::vector<std::string> extra) {
    std::vector<std::string> args = {"check-projectivity", "--family", family, "--n", "4", "--n-sub", "3"};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli_call(args);
  };

  auto inv = run_check("bernoulli-invariant", grid_flag);
  auto rows = parse_csv(inv.out);
  const double inv_max = std::stod(rows.back()[0]);
  o.require(inv.code == 0 && inv_max <= 1e-9 && rows.back()[1] == "projective-on-grid",
            fmt::format("invariant max_tv={:.3g}", inv_max));

  auto off = run_check("bernoulli-offset", grid_flag);
  rows = parse_csv(off.out);
  const double off_max = std::stod(rows.back()[0]);
  bool any_param_equal = false;
  double tv_at_zero = -1.0;
  for (std::size_t i = 1; i + 2 < rows.size(); ++i) {
    any_param_equal = any_param_equal || rows[i][2] == "true";
    if (std::stod(rows[i][0]) == 0.0) tv_at_zero = std::stod(rows[i][1]);
  }
  o.require(off.code == 0 && off_max >= 1e-3 && !any_param_equal &&
                rows.back()[1] == "non-projective",
            fmt::format("offset max_tv={:.5f} param_equal=false", off_max));
  o.require(std::abs(tv_at_zero - 0.09013) <= 1e-5, fmt::format("offset tv(0)={:.6f}", tv_at_zero));

  std::vector<std::string> et_points;
  for (double a : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    et_points.push_back("--theta-point");
    et_points.push_back(fmt::format("{},0.5", a));
  }
  auto et = run_check("edge-triangle", et_points);
  rows = parse_csv(et.out);
  const double et_max = std::stod(rows.back()[0]);
  o.require(et.code == 0 && et_max >= 1e-3 && rows.back()[1] == "non-projective",
            fmt::format("edge-triangle max_tv={:.4f}", et_max));
  return o;
}

Outcome proper_likelihood_oracle() {
  Outcome o;
  const auto spec = ModelSpec::edge_triangle();
  double worst = 0.0;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-1.0, 0.5, 1.0}) {
      const auto theta = th(a, b);
      const auto table = marginal_distribution(build_distribution(spec, theta, 5),
                                               NodeSubset::prefix(5, 3));
      for (std::uint64_t k = 0; k < 8; ++k) {
        const double enumerated = proper_log_likelihood(spec, theta, graph_from_index(3, k), 5);
        worst = std::max(worst, std::abs(enumerated - std::log(table.probs[k])));
      }
    }
  o.require(worst <= 1e-10, fmt::format("max |completion - table| = {:.3g}", worst));
  return o;
}

Outcome projective_likelihoods_agree() {
  Outcome o;
  const auto spec = ModelSpec::bernoulli_invariant();
  RandomStream rng = RandomStream::derive(kSeed, {100});
  double worst = 0.0;
  for (int dataset = 0; dataset < 100; ++dataset) {
    const auto n_sub = static_cast<NodeId>(2 + rng.below(19));             // 2..20
    const auto population = static_cast<NodeId>(n_sub + 1 + rng.below(200));
    const Graph y = sample_bernoulli(n_sub, rng.uniform(), rng);
    for (double t : {-2.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.0})
      worst = std::max(worst, std::abs(proper_log_likelihood(spec, th(t), y, population) -
                                       misspecified_log_likelihood(spec, th(t), y)));
  }
  o.require(worst <= 1e-10, fmt::format("max |proper - misspecified| = {:.3g}", worst));
  return o;
}

Outcome gradient_identity() {
  Outcome o;
  const auto spec = ModelSpec::edge_triangle();
  const double h = 1e-5;
  double worst = 0.0;
  for (NodeId n : {3u, 4u, 5u})
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {-0.5, 0.25, 1.0}) {
        const auto theta = th(a, b);
        const auto mean = expected_stats(spec, theta, n);
        for (int c = 0; c < 2; ++c) {
          ParamVector e = ParamVector::Zero(2);
          e(c) = h;
          const double fd = (log_normalizer(spec, theta + e, n) - log_normalizer(spec, theta - e, n)) / (2 * h);
          worst = std::max(worst, std::abs(fd - mean(c)) / std::abs(mean(c)));
        }
      }
  o.require(worst <= 1e-6, fmt::format("max relative error = {:.3g}", worst));
  return o;
}

Outcome growth_consistency() {
  Outcome o;
  const auto& rows = growth_report().rows;
  bool decreasing = true;
  std::string rmse;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rmse += fmt::format("{}{}:{:.4f}", i ? " " : "", rows[i].n, rows[i].rmse);
    if (i > 0) decreasing = decreasing && rows[i].rmse < rows[i - 1].rmse;
  }
  o.require(decreasing, "RMSE strictly decreasing (" + rmse + ")");
  const double ratio = rows[3].rmse / rows[1].rmse;
  o.require(ratio <= 0.7, fmt::format("RMSE(400)/RMSE(100) = {:.3f} <= 0.7", ratio));
  int boundary = 0, total = 0;
  for (const auto& r : rows) {
    boundary += r.n_boundary;
    total += r.replicates;
  }
  o.require(boundary <= 0.01 * total, fmt::format("boundary replicates {}/{}", boundary, total));
  return o;
}

Outcome mean_degree_invariance() {
  Outcome o;
  const auto& row = growth_report().rows.back();
  const double e = std::exp(1.0);
  o.require(row.n == 400 && std::abs(row.mean_degree - e) <= 0.05 * e,
            fmt::format("mean degree at n=400 = {:.4f} (e = {:.5f})", row.mean_degree, e));
  return o;
}

Outcome subsampling_bias() {
  Outcome o;
  const auto report = run_experiment(parse_config(subsample_config()));
  const std::size_t reps = 500;
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& prop = report.records[r];
    const auto& mis = report.records[reps + r];
    if (prop.boundary || mis.boundary) continue;
    ++checked;
    worst = std::max(worst, std::abs(mis.theta_hat(0) - prop.theta_hat(0) - std::log(0.25)));
  }
  o.require(worst <= 1e-12 && checked > 0,
            fmt::format("identity max error {:.3g} over {} replicates", worst, checked));
  const auto& proper = report.rows[0];
  const auto& misspecified = report.rows[1];
  o.require(std::abs(proper.bias) <= 3 * proper.mc_se,
            fmt::format("proper bias {:.4f}, 3 MC s.e. = {:.4f}", proper.bias, 3 * proper.mc_se));
  o.require(std::abs(misspecified.bias - std::log(0.25)) <= 0.1,
            fmt::format("misspecified bias {:.4f} vs log(1/4) = {:.4f}", misspecified.bias, std::log(0.25)));
  return o;
}

Outcome replication_consistency() {
  Outcome o;
  const auto bern = run_experiment(parse_config(replication_bernoulli_config())).rows;
  o.require(bern[0].rmse > bern[1].rmse && bern[1].rmse > bern[2].rmse,
            fmt::format("bernoulli RMSE {:.4f} > {:.4f} > {:.4f}", bern[0].rmse, bern[1].rmse, bern[2].rmse));
  const double ratio = bern[2].rmse / bern[0].rmse;
  o.require(ratio <= 0.35, fmt::format("bernoulli RMSE(160)/RMSE(10) = {:.3f} <= 0.35", ratio));

  const auto et = run_experiment(parse_config(replication_edge_triangle_config())).rows;
  // Rows: (R=10, c0), (R=10, c1), (R=40, c0), ...
  for (int c = 0; c < 2; ++c) {
    const double r10 = et[c].rmse, r40 = et[2 + c].rmse, r160 = et[4 + c].rmse;
    o.require(r10 > r40 && r40 > r160,
              fmt::format("edge-triangle theta_{} RMSE {:.4f} > {:.4f} > {:.4f} (boundary {} / {} / {})", c,
                          r10, r40, r160, et[c].n_boundary, et[2 + c].n_boundary, et[4 + c].n_boundary));
  }
  return o;
}

Outcome connectivity_threshold() {
  Outcome o;
  const auto rows = run_experiment(parse_config(threshold_config())).rows;
  o.require(rows[0].prop_connected < rows[1].prop_connected &&
                rows[1].prop_connected < rows[2].prop_connected,
            fmt::format("prop_connected {:.3f} < {:.3f} < {:.3f}", rows[0].prop_connected,
                        rows[1].prop_connected, rows[2].prop_connected));
  o.require(rows[2].prop_connected >= 0.9, fmt::format("c=2: {:.3f} >= 0.9", rows[2].prop_connected));
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("projgraph_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::vector<std::string>>> commands;
  int idx = 0;
  for (const auto& cfg : {growth_config(), subsample_config(), replication_bernoulli_config(),
                          replication_edge_triangle_config(), threshold_config()}) {
    const auto path = (dir / fmt::format("config_{}.json", idx++)).string();
    std::ofstream(path) << cfg.dump(2);
    commands.push_back({std::string(cfg["experiment"]), {"experiment", path}});
  }
  commands.push_back({"sample bernoulli", {"--seed", "7", "sample", "--family", "bernoulli-offset",
                                           "--theta", "1", "--n", "60", "--count", "20"}});
  commands.push_back({"sample edge-triangle", {"--seed", "7", "sample", "--family", "edge-triangle",
                                               "--theta", "0,0.5", "--n", "6", "--count", "20"}});
  for (const auto& [name, args] : commands) {
    std::vector<std::string> one = {"--threads", "1"}, eight = {"--threads", "8"};
    one.insert(one.end(), args.begin(), args.end());
    eight.insert(eight.end(), args.begin(), args.end());
    const auto a = cli_call(one);
    const auto b = cli_call(eight);
    o.require(a.code == 0 && b.code == 0 && !a.out.empty() && a.out == b.out, name);
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double max_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 projectivity ground truth", 1.0, projectivity_ground_truth},
      {"2 proper likelihood equals full-table marginal", 5.0, proper_likelihood_oracle},
      {"3 projective case: proper == misspecified", 0.0, projective_likelihoods_agree},
      {"4 gradient identity dlogZ/dtheta = E[s]", 10.0, gradient_identity},
      {"5 growth consistency", 60.0, growth_consistency},
      {"6 mean-degree invariance", 0.0, mean_degree_invariance},
      {"7 subsampling bias", 30.0, subsampling_bias},
      {"8 replication consistency", 120.0, replication_consistency},
      {"9 connectivity threshold", 30.0, connectivity_threshold},
      {"10 determinism across 1 and 8 threads", 0.0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0.0) outcome.require(secs < c.max_seconds, fmt::format("runtime {:.2f}s < {}s", secs, c.max_seconds));
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  [" << c.name << "]  " << outcome.detail
              << fmt::format("  ({:.2f}s)", secs) << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : fmt::format("{} criterion/criteria failed", failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}

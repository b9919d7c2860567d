#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "projgraph/edge_list.hpp"
#include "projgraph/errors.hpp"
#include "projgraph/exact.hpp"
#include "projgraph/experiments.hpp"
#include "projgraph/inference.hpp"
#include "projgraph/parallel.hpp"

namespace projgraph::cli {

namespace {

constexpr std::uint64_t kSampleTag = 10;

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  unsigned enum_cap = kDefaultEnumerationCap;
  std::optional<unsigned> threads;
};

struct ModelArgs {
  std::string family;
  std::vector<double> theta;
};

struct DataArgs {
  std::vector<std::string> files;
  std::string observation = "full";
  std::string kind = "proper";
  std::optional<unsigned> population_n;
};

void add_model_options(CLI::App* cmd, ModelArgs& m, bool with_theta) {
  cmd->add_option("--family", m.family,
                  "bernoulli-invariant | bernoulli-offset | edge-triangle")
      ->required();
  if (with_theta)
    cmd->add_option("--theta", m.theta, "parameter vector, e.g. --theta 0,0.5")
        ->delimiter(',')
        ->allow_extra_args(false);
}

void add_data_options(CLI::App* cmd, DataArgs& d) {
  cmd->add_option("--data", d.files, "edge-list file(s)")->required();
  cmd->add_option("--observation", d.observation, "full | subgraph | replicates");
  cmd->add_option("--kind", d.kind, "proper | misspecified");
  cmd->add_option("--population-n", d.population_n, "population size for subgraph data");
}

ModelSpec model_spec(const ModelArgs& m) { return ModelSpec{parse_family(m.family)}; }

ParamVector theta_vector(const ModelSpec& spec, const ModelArgs& m) {
  if (m.theta.empty()) throw InvalidArgument("--theta is required");
  ParamVector theta = Eigen::Map<const Eigen::VectorXd>(m.theta.data(),
                                                        static_cast<Eigen::Index>(m.theta.size()));
  try {
    validate_theta(spec, theta);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("--theta: ") + e.what());
  }
  return theta;
}

std::vector<Graph> load_graphs(const std::vector<std::string>& files) {
  std::vector<Graph> graphs;
  for (const auto& f : files) {
    try {
      auto g = read_edge_lists(std::filesystem::path(f));
      graphs.insert(graphs.end(), g.begin(), g.end());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("--data " + f + ": " + e.what());
    }
  }
  if (graphs.empty()) throw InvalidArgument("--data: no graphs found");
  return graphs;
}

// Datasets described by --observation; one per graph except for replicates.
std::vector<ObservedData> datasets(const DataArgs& d, LikelihoodKind kind) {
  const auto graphs = load_graphs(d.files);
  std::vector<ObservedData> out;
  if (d.observation == "full") {
    if (kind == LikelihoodKind::Misspecified)
      throw InvalidArgument("--kind misspecified requires --observation subgraph");
    for (const auto& g : graphs) out.emplace_back(FullGraph{g});
  } else if (d.observation == "replicates") {
    if (kind == LikelihoodKind::Misspecified)
      throw InvalidArgument("--kind misspecified requires --observation subgraph");
    out.emplace_back(Replicates{graphs});
  } else if (d.observation == "subgraph") {
    if (kind == LikelihoodKind::Proper && !d.population_n)
      throw InvalidArgument("--population-n is required for --kind proper with subgraph data");
    for (const auto& g : graphs) {
      const NodeId population = d.population_n ? *d.population_n : g.n() + 1;
      if (population <= g.n())
        throw InvalidArgument("--population-n must exceed the subgraph size " +
                              std::to_string(g.n()));
      out.emplace_back(InducedSubgraph{g, population});
    }
  } else {
    throw InvalidArgument("--observation must be full, subgraph or replicates");
  }
  for (const auto& data : out) validate_data(data);
  return out;
}

// Writes text to path in one go; nothing is created when validation failed earlier.
void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write failure on " + path);
}

void emit(const Globals& g, std::ostream& out, const std::string& text) {
  if (g.out.empty())
    out << text;
  else
    write_file(g.out, text);
}

std::vector<ParamVector> projectivity_grid(const ModelSpec& spec,
                                           const std::vector<std::string>& points,
                                           const std::vector<double>& values) {
  if (!points.empty() && !values.empty())
    throw InvalidArgument("--theta-point and --grid-values are mutually exclusive");
  std::vector<ParamVector> grid;
  if (!points.empty()) {
    for (const auto& p : points) {
      std::vector<double> v;
      std::stringstream ss(p);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          v.push_back(std::stod(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
          throw InvalidArgument("--theta-point: cannot parse '" + p + "'");
        }
      }
      ParamVector t = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      try {
        validate_theta(spec, t);
      } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("--theta-point: ") + e.what());
      }
      grid.push_back(t);
    }
    return grid;
  }
  if (values.empty()) return default_theta_grid(spec);
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("--grid-values must be finite");
  if (spec.stat_dim() == 1) {
    for (double v : values) grid.push_back(ParamVector::Constant(1, v));
  } else {
    for (double a : values)
      for (double b : values) grid.push_back((ParamVector(2) << a, b).finished());
  }
  return grid;
}

unsigned threads_from_env() {
  if (const char* env = std::getenv("PROJGRAPH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw InvalidArgument("PROJGRAPH_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"projgraph: exact inference and simulation for exponential-family random graph models",
               "projgraph"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "master seed for every random stream");
  app.add_option("--out", g.out, "output path (CSV); standard output when absent");
  app.add_option("--enum-cap", g.enum_cap, "enumeration cap on n (default 7, at most 8)");
  app.add_option("--threads", g.threads, "worker threads (falls back to PROJGRAPH_THREADS)");

  // sample
  ModelArgs sample_model;
  unsigned sample_n = 0;
  int sample_count = 1;
  auto* sample = app.add_subcommand("sample", "draw graphs and write them as edge lists");
  add_model_options(sample, sample_model, true);
  sample->add_option("--n", sample_n, "node count")->required();
  sample->add_option("--count", sample_count, "number of graphs");

  // stats
  std::vector<std::string> stats_files;
  auto* stats = app.add_subcommand("stats", "sufficient statistics of edge-list graphs");
  stats->add_option("--data", stats_files, "edge-list file(s)")->required();

  // loglik
  ModelArgs loglik_model;
  DataArgs loglik_data;
  auto* loglik = app.add_subcommand("loglik", "evaluate a log likelihood");
  add_model_options(loglik, loglik_model, true);
  add_data_options(loglik, loglik_data);

  // mle
  ModelArgs mle_model;
  DataArgs mle_data;
  auto* mle_cmd = app.add_subcommand("mle", "maximum likelihood estimation");
  add_model_options(mle_cmd, mle_model, false);
  add_data_options(mle_cmd, mle_data);

  // check-projectivity
  ModelArgs proj_model;
  unsigned proj_n = 0, proj_n_sub = 0;
  std::vector<std::string> proj_points;
  std::vector<double> proj_values;
  auto* proj = app.add_subcommand("check-projectivity",
                                  "compare the marginal of the n-node model with the n_sub model");
  add_model_options(proj, proj_model, false);
  proj->add_option("--n", proj_n, "larger node count")->required();
  proj->add_option("--n-sub", proj_n_sub, "smaller node count")->required();
  proj->add_option("--theta-point", proj_points, "explicit grid point, e.g. 0,0.5 (repeatable)");
  proj->add_option("--grid-values", proj_values, "per-component values of a product grid")
      ->delimiter(',');

  // experiment
  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo study from a JSON config");
  experiment->add_option("config", config_path, "experiment config file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    // Validation of global flags.
    if (g.enum_cap == 0) throw InvalidArgument("--enum-cap must be >= 1");
    set_enumeration_cap(static_cast<NodeId>(g.enum_cap));
    if (g.enum_cap == kMaxEnumerationCap)
      err << "warning: --enum-cap 8 enumerates up to 2^28 graphs (about 2 GB per table)\n";
    if (g.threads && *g.threads == 0) throw InvalidArgument("--threads must be >= 1");
    set_thread_count(g.threads ? *g.threads : threads_from_env());

    if (*sample) {
      const ModelSpec spec = model_spec(sample_model);
      const ParamVector theta = theta_vector(spec, sample_model);
      if (sample_n < 1) throw InvalidArgument("--n must be >= 1");
      if (sample_count < 1) throw InvalidArgument("--count must be >= 1");
      if (!spec.is_bernoulli()) require_enumerable(static_cast<NodeId>(sample_n));

      std::ostringstream text;
      const NodeId n = static_cast<NodeId>(sample_n);
      std::optional<ExactSampler> sampler;
      double pi = 0.0;
      if (spec.is_bernoulli())
        pi = edge_prob(spec, theta, n);
      else
        sampler.emplace(build_distribution(spec, theta, n));
      for (int i = 0; i < sample_count; ++i) {
        auto rng = RandomStream::derive(g.seed, {kSampleTag, static_cast<std::uint64_t>(i)});
        write_edge_list(text, sampler ? (*sampler)(rng) : sample_bernoulli(n, pi, rng));
      }
      emit(g, out, text.str());
    } else if (*stats) {
      const auto graphs = load_graphs(stats_files);
      std::ostringstream text;
      text << "graph,n,edges,triangles,mean_degree,connected\n";
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto& gr = graphs[i];
        text << i << ',' << gr.n() << ',' << edge_count(gr) << ',' << triangle_count(gr) << ','
             << fmt::format("{}", mean_degree(gr)) << ',' << (is_connected(gr) ? "true" : "false")
             << '\n';
      }
      emit(g, out, text.str());
    } else if (*loglik) {
      const ModelSpec spec = model_spec(loglik_model);
      const ParamVector theta = theta_vector(spec, loglik_model);
      const LikelihoodKind kind = parse_kind(loglik_data.kind);
      const auto sets = datasets(loglik_data, kind);
      std::ostringstream text;
      text << "family,kind,log_lik\n";
      for (const auto& data : sets)
        text << family_name(spec.family) << ',' << kind_name(kind) << ','
             << fmt::format("{}", log_likelihood(spec, theta, data, kind)) << '\n';
      emit(g, out, text.str());
    } else if (*mle_cmd) {
      const ModelSpec spec = model_spec(mle_model);
      const LikelihoodKind kind = parse_kind(mle_data.kind);
      const auto sets = datasets(mle_data, kind);
      std::ostringstream text;
      write_mle_csv_header(text, spec.stat_dim());
      for (const auto& data : sets) write_mle_csv_row(text, spec, kind, mle(spec, data, kind));
      emit(g, out, text.str());
    } else if (*proj) {
      const ModelSpec spec = model_spec(proj_model);
      if (proj_n_sub < 1 || proj_n_sub >= proj_n)
        throw InvalidArgument("--n-sub must satisfy 1 <= n_sub < n");
      const auto grid = projectivity_grid(spec, proj_points, proj_values);
      require_enumerable(static_cast<NodeId>(proj_n));
      const auto report = projectivity_check(spec, grid, static_cast<NodeId>(proj_n),
                                             static_cast<NodeId>(proj_n_sub));
      std::ostringstream text;
      write_projectivity_csv(text, report);
      emit(g, out, text.str());
    } else if (*experiment) {
      nlohmann::json j;
      {
        std::ifstream f(config_path);
        if (!f) throw IoError("cannot open config " + config_path);
        try {
          j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
          throw InvalidArgument("config " + config_path + ": " + e.what());
        }
      }
      const ExperimentConfig cfg = parse_config(j);
      const ExperimentReport report = run_experiment(cfg);
      std::ostringstream text;
      write_report_csv(text, report);
      emit(g, out, text.str());
      if (!g.out.empty()) write_file(g.out + ".meta.json", report.metadata.dump(2) + "\n");
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const EnumerationCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kEnumerationCap;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

}  // namespace projgraph::cli

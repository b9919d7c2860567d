#include "projgraph/edge_list.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "projgraph/errors.hpp"

namespace projgraph {

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.n() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
    std::size_t q = p;
    while (q < line.size() && line[q] != ' ' && line[q] != '\t' && line[q] != '\r') ++q;
    if (q > p) out.push_back(line.substr(p, q - p));
    p = q;
  }
  return out;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("edge list line " + std::to_string(line_no) +
                          ": expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<Graph> read_edge_lists(std::istream& in) {
  std::vector<Graph> graphs;
  std::optional<Graph> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tok = tokens(view);
    if (tok.empty()) continue;
    auto where = [&] { return "edge list line " + std::to_string(line_no) + ": "; };
    if (tok.size() == 1) {
      if (current) graphs.push_back(std::move(*current));
      const std::uint64_t n = parse_uint(tok[0], line_no);
      if (n == 0 || n > (std::uint64_t{1} << 24))
        throw InvalidArgument(where() + "node count must be in [1, 2^24]");
      current.emplace(static_cast<NodeId>(n));
      continue;
    }
    if (tok.size() != 2) throw InvalidArgument(where() + "expected `i j`");
    if (!current) throw InvalidArgument(where() + "edge before node count line");
    const std::uint64_t i = parse_uint(tok[0], line_no);
    const std::uint64_t j = parse_uint(tok[1], line_no);
    if (i == j) throw InvalidArgument(where() + "self-loop");
    if (j >= current->n() || i >= current->n()) throw InvalidArgument(where() + "node out of range");
    if (i > j) throw InvalidArgument(where() + "expected i < j");
    const DyadIndex k = dyad_index(static_cast<NodeId>(i), static_cast<NodeId>(j));
    if (current->dyad(k)) throw InvalidArgument(where() + "duplicate edge");
    current->set_dyad(k, true);
  }
  if (current) graphs.push_back(std::move(*current));
  return graphs;
}

std::vector<Graph> read_edge_lists(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  auto graphs = read_edge_lists(in);
  if (in.bad()) throw IoError("read failure on " + path.string());
  return graphs;
}

Graph read_edge_list(std::istream& in) {
  auto graphs = read_edge_lists(in);
  if (graphs.size() != 1)
    throw InvalidArgument("expected exactly one graph, found " + std::to_string(graphs.size()));
  return std::move(graphs.front());
}

}  // namespace projgraph

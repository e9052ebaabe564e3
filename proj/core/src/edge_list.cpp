#include "doppel/edge_list.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace doppel {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool next_token(std::string_view& rest, std::string_view& token) {
  const auto start = rest.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) return false;
  rest.remove_prefix(start);
  const auto end = rest.find_first_of(" \t\r");
  token = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return true;
}

std::uint64_t parse_id(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected a nonnegative integer node id, got '" + std::string(token) + "'");
  }
  return value;
}

// "# nodes N ..." -> N
bool parse_header(std::string_view comment, std::uint64_t& nodes) {
  comment.remove_prefix(1);
  std::string_view tok;
  if (!next_token(comment, tok) || tok != "nodes") return false;
  if (!next_token(comment, tok)) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), nodes);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

IngestResult read_edge_list(std::istream& in) {
  struct Record {
    std::uint64_t u, v;
    std::size_t line;
  };
  std::vector<Record> raw;
  std::string buffer;
  std::size_t line_no = 0;
  bool canonical = false;
  std::uint64_t declared_nodes = 0;
  while (std::getline(in, buffer)) {
    ++line_no;
    std::string_view line = trim(buffer);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (raw.empty() && !canonical && parse_header(line, declared_nodes)) canonical = true;
      continue;
    }
    std::string_view rest = line, a, b, extra;
    if (!next_token(rest, a) || !next_token(rest, b)) {
      throw ParseError(line_no, "expected two node ids");
    }
    if (next_token(rest, extra)) throw ParseError(line_no, "trailing token '" + std::string(extra) + "'");
    raw.push_back({parse_id(a, line_no), parse_id(b, line_no), line_no});
  }

  IngestResult result;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  if (canonical) {
    for (auto [u, v, line] : raw) {
      if (u >= declared_nodes || v >= declared_nodes) {
        throw ParseError(line, "node id exceeds declared node count " + std::to_string(declared_nodes));
      }
      edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
    result.original_ids.resize(declared_nodes);
    for (std::uint64_t i = 0; i < declared_nodes; ++i) result.original_ids[i] = i;
  } else {
    std::unordered_map<std::uint64_t, NodeId> compact;
    auto intern = [&](std::uint64_t id) {
      auto [it, inserted] = compact.try_emplace(id, static_cast<NodeId>(result.original_ids.size()));
      if (inserted) result.original_ids.push_back(id);
      return it->second;
    };
    for (const Record& r : raw) {
      NodeId cu = intern(r.u);
      NodeId cv = intern(r.v);
      edges.push_back({cu, cv});
    }
  }
  result.graph = Graph::from_edges(result.original_ids.size(), edges, &result.dropped);
  return result;
}

IngestResult read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g, std::optional<std::uint64_t> seed) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  if (seed) out << "# seed " << *seed << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g, std::optional<std::uint64_t> seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list " + path.string());
  write_edge_list(out, g, seed);
}

}  // namespace doppel

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doppel/graph.hpp"

namespace doppel {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct IngestResult {
  Graph graph;
  /// original_ids[compact_id] = id as written in the file.
  std::vector<std::uint64_t> original_ids;
  BuildStats dropped;
};

/// Reads "u v" lines; '#' lines and blank lines are skipped.
///
/// Raw files are compacted to 0..n-1 in order of first appearance. A file
/// that starts with the canonical header "# nodes N" is taken to be already
/// compact: ids are kept as written and isolated nodes below N survive.
IngestResult read_edge_list(std::istream& in);
IngestResult read_edge_list(const std::filesystem::path& path);

/// Canonical form: "# nodes N edges M" header, then each edge once as
/// "u v" with u < v in lexicographic order. A seed, when given, is recorded
/// on a "# seed S" line after the header.
void write_edge_list(std::ostream& out, const Graph& g, std::optional<std::uint64_t> seed = std::nullopt);
void write_edge_list(const std::filesystem::path& path, const Graph& g,
                     std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace doppel

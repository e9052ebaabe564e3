#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "doppel/embedding.hpp"
#include "doppel/gan.hpp"

namespace doppel {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter files are JSON objects
///   {"kind": ..., "seed": ..., "params": [{"name", "shape": [r, c], "data": [...]}]}
/// with data in row-major order.
std::string link_model_to_json(LinkModel& model, std::optional<std::uint64_t> seed = std::nullopt);
LinkModel link_model_from_json(const std::string& text);

std::string generator_to_json(GeneratorParams& gen, std::optional<std::uint64_t> seed = std::nullopt);
GeneratorParams generator_from_json(const std::string& text);

std::string critic_to_json(CriticParams& critic, std::optional<std::uint64_t> seed = std::nullopt);
CriticParams critic_from_json(const std::string& text);

/// Embedding TSV: optional "# seed S" line, then "id\tv1\t...\tvd" per row,
/// values printed with 17 significant digits.
void write_embeddings(std::ostream& out, const EmbeddingMatrix& emb, std::optional<std::uint64_t> seed = std::nullopt);
EmbeddingMatrix read_embeddings(std::istream& in);

/// "id\tlabel" per row.
void write_labels(std::ostream& out, const std::vector<int>& labels, std::optional<std::uint64_t> seed = std::nullopt);

/// Whitespace-separated "id label" lines keyed by the id as written.
std::unordered_map<std::uint64_t, int> read_label_map(std::istream& in);
/// Whitespace-separated "id x1 ... xk" lines keyed by the id as written.
std::unordered_map<std::uint64_t, std::vector<double>> read_feature_map(std::istream& in);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);
std::string digest_hex(std::uint64_t value);

}  // namespace doppel

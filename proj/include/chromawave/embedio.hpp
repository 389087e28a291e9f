#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "chromawave/embedding.hpp"

namespace chromawave::embedio {

struct FileMeta {
  std::string producer;
  std::string version;
  std::string manifest;  // dataset manifest the embeddings were computed from
};

struct EmbeddingFile {
  std::optional<FileMeta> meta;
  std::vector<Embedding> records;
};

/// One JSON object per line: {"id","alg","tag","dim","v"}. Numbers are
/// written with 17 significant digits so a read returns identical doubles.
/// An optional first line {"meta": {...}} carries file metadata.
void write_embeddings(std::ostream& out, std::span<const Embedding> records,
                      const std::optional<FileMeta>& meta = std::nullopt);
void write_embeddings(const std::filesystem::path& path, std::span<const Embedding> records,
                      const std::optional<FileMeta>& meta = std::nullopt);

/// Serializes a single record (no trailing newline).
std::string format_record(const Embedding& e);

/// Streaming reader; holds one record at a time plus the set of seen ids.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Reads the next record; returns false at end of input. Throws LineError
  /// on malformed lines, dim mismatch, duplicate ids, or mixed alg/dim.
  bool next(Embedding& out);

  const std::optional<FileMeta>& meta() const noexcept { return meta_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::optional<FileMeta> meta_;
  std::size_t line_ = 0;
  std::size_t records_ = 0;
  std::string alg_;
  std::size_t dim_ = 0;
  std::unordered_set<std::string> ids_;
};

EmbeddingFile read_embeddings(std::istream& in);
EmbeddingFile read_embeddings(const std::filesystem::path& path);

}  // namespace chromawave::embedio

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptqa/geo.hpp"

namespace adaptqa::corpus {

struct DocumentRecord {
  std::string doc_id;
  std::string title;
  std::string body;
  std::vector<geo::GeoTag> geo;
  std::optional<int> year;
  std::string source_url;
};

/// Word-window chunking: windows of `size_words` starting every
/// `size_words - overlap_words` words.
struct ChunkPolicy {
  std::size_t size_words = 300;
  std::size_t overlap_words = 50;

  std::size_t stride() const { return size_words - overlap_words; }

  /// Throws std::invalid_argument when size <= overlap or size == 0.
  void validate() const;
};

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

struct Chunk {
  std::string chunk_id;  // "<doc_id>#<window index>"
  std::string doc_id;
  std::string text;      // exact body slice at span
  std::vector<geo::GeoTag> geo;
  CharSpan span;
};

/// Chunks cover the body in stride order and inherit doc.geo. Chunk 0's
/// span starts at offset 0 and the final chunk's span ends at body size,
/// so the spans stitched together reproduce the body byte for byte.
std::vector<Chunk> chunk_document(const DocumentRecord& doc,
                                  const ChunkPolicy& policy);

struct RejectedRecord {
  std::size_t line = 0;
  std::string doc_id;  // may be empty when the id itself was unusable
  std::string reason;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t chunks = 0;
  std::vector<RejectedRecord> rejects;
};

/// Immutable after ingestion; retrieval sessions read it concurrently.
class CorpusStore {
 public:
  /// Corpus file: one JSON record per line with fields doc_id, title, body,
  /// geo (array of "Country/Adm1" labels), year, source_url. Malformed
  /// records are skipped and reported in the stats; an unreadable file
  /// throws std::runtime_error. When a gazetteer is given, geo labels are
  /// canonicalized through it and records without geo metadata fall back to
  /// gazetteer extraction over title plus the head of the body.
  CorpusStats ingest_file(const std::filesystem::path& path,
                          const ChunkPolicy& policy,
                          const geo::Gazetteer* gaz = nullptr);

  /// Throws std::invalid_argument on duplicate doc_id or empty body.
  void add_document(DocumentRecord doc, const ChunkPolicy& policy);

  const std::vector<Chunk>& chunks() const { return chunks_; }
  const std::vector<DocumentRecord>& documents() const { return documents_; }

  const Chunk* find_chunk(std::string_view chunk_id) const;
  const DocumentRecord* find_document(std::string_view doc_id) const;

  /// "Title (year)" or just the title; falls back to the doc id.
  std::string source_label(const Chunk& chunk) const;

  bool empty() const { return chunks_.empty(); }

 private:
  std::vector<DocumentRecord> documents_;
  std::vector<Chunk> chunks_;
  std::map<std::string, std::size_t, std::less<>> doc_index_;
  std::map<std::string, std::size_t, std::less<>> chunk_index_;
};

}  // namespace adaptqa::corpus

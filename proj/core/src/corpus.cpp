#include "adaptqa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adaptqa/text.hpp"

namespace adaptqa::corpus {

using nlohmann::json;

void ChunkPolicy::validate() const {
  if (size_words == 0) {
    throw std::invalid_argument("chunk size must be positive");
  }
  if (overlap_words >= size_words) {
    throw std::invalid_argument("chunk overlap must be smaller than chunk size");
  }
}

std::vector<Chunk> chunk_document(const DocumentRecord& doc,
                                  const ChunkPolicy& policy) {
  policy.validate();
  auto words = text::word_spans(doc.body);
  if (words.empty()) {
    throw std::invalid_argument("document has an empty body: " + doc.doc_id);
  }
  std::vector<Chunk> chunks;
  const std::size_t n = words.size();
  for (std::size_t k = 0; k * policy.stride() < n; ++k) {
    const std::size_t first = k * policy.stride();
    const std::size_t last = std::min(first + policy.size_words, n) - 1;
    Chunk chunk;
    chunk.chunk_id = doc.doc_id + "#" + std::to_string(k);
    chunk.doc_id = doc.doc_id;
    chunk.geo = doc.geo;
    // Spans absorb surrounding whitespace so adjacent spans tile the body:
    // the first span starts at 0, each interior span ends where the next
    // word after the window begins, and the final span runs to the end.
    chunk.span.begin = (k == 0) ? 0 : words[first].begin;
    chunk.span.end = (last + 1 < n) ? words[last + 1].begin : doc.body.size();
    chunk.text = doc.body.substr(chunk.span.begin, chunk.span.end - chunk.span.begin);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

CorpusStats CorpusStore::ingest_file(const std::filesystem::path& path,
                                     const ChunkPolicy& policy,
                                     const geo::Gazetteer* gaz) {
  policy.validate();
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read corpus file: " + path.string());
  }
  CorpusStats stats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      stats.rejects.push_back({lineno, "", "invalid json"});
      continue;
    }
    DocumentRecord doc;
    doc.doc_id = rec.value("doc_id", "");
    if (doc.doc_id.empty()) {
      stats.rejects.push_back({lineno, "", "missing doc_id"});
      continue;
    }
    if (doc_index_.count(doc.doc_id)) {
      stats.rejects.push_back({lineno, doc.doc_id, "duplicate doc_id"});
      continue;
    }
    doc.title = rec.value("title", "");
    doc.body = rec.value("body", "");
    if (text::word_spans(doc.body).empty()) {
      stats.rejects.push_back({lineno, doc.doc_id, "empty body"});
      continue;
    }
    if (rec.contains("year") && rec["year"].is_number_integer()) {
      doc.year = rec["year"].get<int>();
    }
    doc.source_url = rec.value("source_url", "");
    if (rec.contains("geo") && rec["geo"].is_array()) {
      for (const auto& g : rec["geo"]) {
        if (!g.is_string()) continue;
        if (auto tag = geo::parse_geo_label(g.get<std::string>(), gaz)) {
          if (std::find(doc.geo.begin(), doc.geo.end(), *tag) == doc.geo.end()) {
            doc.geo.push_back(std::move(*tag));
          }
        }
      }
    }
    if (doc.geo.empty() && gaz) {
      // No supplied metadata: extract from title + head of body.
      std::string head = doc.title + " " + doc.body.substr(0, 2000);
      doc.geo = geo::extract_query_locations(head, *gaz);
    }
    add_document(std::move(doc), policy);
    ++stats.documents;
  }
  stats.chunks = chunks_.size();
  return stats;
}

void CorpusStore::add_document(DocumentRecord doc, const ChunkPolicy& policy) {
  if (doc_index_.count(doc.doc_id)) {
    throw std::invalid_argument("duplicate doc_id: " + doc.doc_id);
  }
  auto chunks = chunk_document(doc, policy);
  doc_index_.emplace(doc.doc_id, documents_.size());
  documents_.push_back(std::move(doc));
  for (auto& chunk : chunks) {
    chunk_index_.emplace(chunk.chunk_id, chunks_.size());
    chunks_.push_back(std::move(chunk));
  }
}

const Chunk* CorpusStore::find_chunk(std::string_view chunk_id) const {
  auto it = chunk_index_.find(chunk_id);
  return it == chunk_index_.end() ? nullptr : &chunks_[it->second];
}

const DocumentRecord* CorpusStore::find_document(std::string_view doc_id) const {
  auto it = doc_index_.find(doc_id);
  return it == doc_index_.end() ? nullptr : &documents_[it->second];
}

std::string CorpusStore::source_label(const Chunk& chunk) const {
  const DocumentRecord* doc = find_document(chunk.doc_id);
  if (!doc || doc->title.empty()) return chunk.doc_id;
  if (doc->year) return doc->title + " (" + std::to_string(*doc->year) + ")";
  return doc->title;
}

}  // namespace adaptqa::corpus

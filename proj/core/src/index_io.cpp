#include "adaptqa/index_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace adaptqa {

using nlohmann::json;

namespace {
constexpr int kIndexVersion = 1;
}

void save_index(const std::filesystem::path& file, const CorpusIndex& index) {
  // Chunking is deterministic, so persisting documents + policy is enough
  // to reproduce chunk ids and spans byte for byte; only the dense vectors
  // (potentially expensive to recompute) are stored alongside.
  json documents = json::array();
  for (const auto& doc : index.store.documents()) {
    json geo = json::array();
    for (const auto& tag : doc.geo) geo.push_back(tag.label());
    json d = {{"doc_id", doc.doc_id},
              {"title", doc.title},
              {"body", doc.body},
              {"geo", geo},
              {"source_url", doc.source_url}};
    if (doc.year) d["year"] = *doc.year;
    documents.push_back(std::move(d));
  }
  json doc = {{"version", kIndexVersion},
              {"embedder", index.dense.embedder_id()},
              {"chunk_policy",
               {{"size_words", index.policy.size_words},
                {"overlap_words", index.policy.overlap_words}}},
              {"documents", documents},
              {"vectors", index.dense.vectors()}};
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot write index file: " + file.string());
  }
  out << doc.dump() << "\n";
}

std::unique_ptr<CorpusIndex> load_index(const std::filesystem::path& file,
                                        const std::string& expected_embedder) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read index file: " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error("index file is not valid JSON: " + file.string());
  }
  if (doc.value("version", 0) != kIndexVersion) {
    throw std::runtime_error("index version mismatch; re-run ingest");
  }
  std::string embedder = doc.value("embedder", "");
  if (!expected_embedder.empty() && embedder != expected_embedder) {
    throw std::runtime_error("index was built with embedder '" + embedder +
                             "', expected '" + expected_embedder +
                             "'; re-run ingest");
  }

  auto index = std::make_unique<CorpusIndex>();
  if (!doc.contains("chunk_policy")) {
    throw std::runtime_error("index file missing chunk_policy; re-run ingest");
  }
  index->policy.size_words =
      doc["chunk_policy"].value("size_words", std::size_t{300});
  index->policy.overlap_words =
      doc["chunk_policy"].value("overlap_words", std::size_t{50});

  for (const auto& d : doc.value("documents", json::array())) {
    corpus::DocumentRecord rec;
    rec.doc_id = d.value("doc_id", "");
    rec.title = d.value("title", "");
    rec.body = d.value("body", "");
    for (const auto& g : d.value("geo", json::array())) {
      if (auto tag = geo::parse_geo_label(g.get<std::string>())) {
        rec.geo.push_back(*tag);
      }
    }
    if (d.contains("year")) rec.year = d["year"].get<int>();
    rec.source_url = d.value("source_url", "");
    index->store.add_document(std::move(rec), index->policy);
  }

  std::vector<std::vector<double>> vectors =
      doc.value("vectors", std::vector<std::vector<double>>{});
  if (vectors.size() != index->store.chunks().size()) {
    throw std::runtime_error("index vectors do not match chunk count; re-run ingest");
  }
  index->sparse = retrieval::SparseIndex::build(index->store.chunks());
  index->dense = retrieval::DenseIndex::from_vectors(std::move(vectors), embedder);
  return index;
}

}  // namespace adaptqa

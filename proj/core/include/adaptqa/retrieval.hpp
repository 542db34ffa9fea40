#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptqa/corpus.hpp"
#include "adaptqa/gateway.hpp"
#include "adaptqa/geo.hpp"

namespace adaptqa::retrieval {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Inverted index with Okapi BM25 scoring. Query terms are deduplicated
/// before scoring; IDF uses ln(1 + (N - df + 0.5) / (df + 0.5)), which never
/// goes negative.
class SparseIndex {
 public:
  static SparseIndex build(const std::vector<corpus::Chunk>& chunks);

  /// Throws std::out_of_range for an unknown chunk id.
  double score(const std::vector<std::string>& query_terms,
               std::string_view chunk_id, const Bm25Params& params) const;

  /// Same scoring against a chunk ordinal; `unique_terms` must already be
  /// deduplicated.
  double score_at(const std::vector<std::string>& unique_terms, std::size_t idx,
                  const Bm25Params& params) const;

  std::size_t size() const { return lengths_.size(); }
  double average_length() const { return avg_length_; }
  std::size_t document_frequency(std::string_view term) const;
  std::size_t index_of(std::string_view chunk_id) const;  // throws out_of_range

 private:
  struct Posting {
    std::uint32_t chunk = 0;
    std::uint32_t tf = 0;
  };

  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::vector<std::uint32_t> lengths_;
  std::map<std::string, std::size_t, std::less<>> id_index_;
  double avg_length_ = 0.0;
};

/// Unit-normalized chunk embeddings; cosine similarity is a dot product.
class DenseIndex {
 public:
  static DenseIndex build(const std::vector<corpus::Chunk>& chunks,
                          llm::Gateway& gateway);
  static DenseIndex from_vectors(std::vector<std::vector<double>> vectors,
                                 std::string embedder_id);

  /// Throws std::invalid_argument on dimension mismatch and
  /// std::out_of_range on a bad ordinal.
  double similarity(std::span<const double> query_vec, std::size_t idx) const;

  std::size_t size() const { return vectors_.size(); }
  std::size_t dimension() const;
  const std::string& embedder_id() const { return embedder_id_; }
  const std::vector<std::vector<double>>& vectors() const { return vectors_; }

 private:
  std::vector<std::vector<double>> vectors_;
  std::string embedder_id_;
};

struct HybridConfig {
  double lambda = 0.5;         // sparse weight in the base blend
  double beta = 0.3;           // location weight
  int k = 8;                   // results to return
  Bm25Params bm25;
  double neutral_loc_sim = 0.0;  // LocSim when the query names no location
  std::size_t pool_size = 100;   // per-channel candidates before normalization

  /// Throws std::invalid_argument when any value is out of range.
  void validate() const;
};

struct RetrievalCandidate {
  std::string chunk_id;
  double sparse_score = 0.0;       // raw BM25
  double dense_score = 0.0;        // raw cosine
  double sparse_norm = 0.0;        // min-max normalized over the pool
  double dense_norm = 0.0;
  double base_hybrid_score = 0.0;  // lambda blend of the normalized pair
  double loc_sim = 0.0;
  double final_score = 0.0;        // (1-beta)*base + beta*loc_sim
};

double base_hybrid_score(double sparse_norm, double dense_norm, double lambda);

/// Hierarchical overlap: per query tag the best chunk-tag match scores 1.0
/// (country and adm1 equal), 0.5 (country only) or 0; the result is the mean
/// over query tags. An empty query geo returns `neutral`.
double loc_sim(const std::vector<geo::GeoTag>& query_geo,
               const std::vector<geo::GeoTag>& chunk_geo, double neutral = 0.0);

double location_weighted_score(double base, double locsim, double beta);

/// Exact scoring over the whole corpus (no ANN): raw BM25 and cosine are
/// min-max normalized per query over the union of each channel's top
/// `pool_size` candidates, blended, then location-weighted. A channel whose
/// raw scores are all equal normalizes to 0.5 uniformly.
class Retriever {
 public:
  Retriever(const corpus::CorpusStore& store, const SparseIndex& sparse,
            const DenseIndex& dense, const geo::Gazetteer& gazetteer,
            llm::Gateway& gateway);

  /// Candidates sorted by final score descending, ties by chunk id
  /// ascending, truncated to k. Empty corpus yields an empty list.
  std::vector<RetrievalCandidate> retrieve(std::string_view question,
                                           const HybridConfig& config) const;

  /// Sub-question variant: when the question itself names no location,
  /// `fallback_geo` (the parent question's tags) keeps localization sticky.
  std::vector<RetrievalCandidate> retrieve(
      std::string_view question, const HybridConfig& config,
      const std::vector<geo::GeoTag>& fallback_geo) const;

  const corpus::CorpusStore& store() const { return store_; }

 private:
  const corpus::CorpusStore& store_;
  const SparseIndex& sparse_;
  const DenseIndex& dense_;
  const geo::Gazetteer& gazetteer_;
  llm::Gateway& gateway_;
};

}  // namespace adaptqa::retrieval

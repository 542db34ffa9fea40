#include "adaptqa/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "adaptqa/text.hpp"

namespace adaptqa::retrieval {

// ---------------------------------------------------------------------------
// SparseIndex

SparseIndex SparseIndex::build(const std::vector<corpus::Chunk>& chunks) {
  SparseIndex index;
  std::map<std::string, std::map<std::uint32_t, std::uint32_t>> counts;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    auto tokens = text::tokenize(chunks[i].text);
    index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    index.id_index_.emplace(chunks[i].chunk_id, i);
    for (const auto& tok : tokens) {
      ++counts[tok][static_cast<std::uint32_t>(i)];
    }
  }
  for (auto& [term, by_chunk] : counts) {
    std::vector<Posting> postings;
    postings.reserve(by_chunk.size());
    for (auto [chunk, tf] : by_chunk) postings.push_back({chunk, tf});
    index.postings_.emplace(term, std::move(postings));
  }
  double total = 0.0;
  for (auto len : index.lengths_) total += len;
  index.avg_length_ = index.lengths_.empty() ? 0.0 : total / index.lengths_.size();
  return index;
}

std::size_t SparseIndex::document_frequency(std::string_view term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

std::size_t SparseIndex::index_of(std::string_view chunk_id) const {
  auto it = id_index_.find(chunk_id);
  if (it == id_index_.end()) {
    throw std::out_of_range("unknown chunk id: " + std::string(chunk_id));
  }
  return it->second;
}

double SparseIndex::score(const std::vector<std::string>& query_terms,
                          std::string_view chunk_id,
                          const Bm25Params& params) const {
  std::vector<std::string> unique(query_terms);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  return score_at(unique, index_of(chunk_id), params);
}

double SparseIndex::score_at(const std::vector<std::string>& unique_terms,
                             std::size_t idx, const Bm25Params& params) const {
  if (idx >= lengths_.size()) {
    throw std::out_of_range("chunk ordinal out of range");
  }
  const double n = static_cast<double>(lengths_.size());
  const double dl = lengths_[idx];
  double score = 0.0;
  for (const auto& term : unique_terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& postings = it->second;
    auto pos = std::lower_bound(
        postings.begin(), postings.end(), static_cast<std::uint32_t>(idx),
        [](const Posting& p, std::uint32_t target) { return p.chunk < target; });
    if (pos == postings.end() || pos->chunk != idx) continue;
    const double df = static_cast<double>(postings.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    const double tf = pos->tf;
    const double denom =
        tf + params.k1 * (1.0 - params.b + params.b * dl / avg_length_);
    score += idf * tf * (params.k1 + 1.0) / denom;
  }
  return score;
}

// ---------------------------------------------------------------------------
// DenseIndex

DenseIndex DenseIndex::build(const std::vector<corpus::Chunk>& chunks,
                             llm::Gateway& gateway) {
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(c.text);
  DenseIndex index;
  if (!texts.empty()) index.vectors_ = gateway.embed(texts);
  index.embedder_id_ = "gateway";
  return index;
}

DenseIndex DenseIndex::from_vectors(std::vector<std::vector<double>> vectors,
                                    std::string embedder_id) {
  DenseIndex index;
  index.vectors_ = std::move(vectors);
  index.embedder_id_ = std::move(embedder_id);
  for (std::size_t i = 1; i < index.vectors_.size(); ++i) {
    if (index.vectors_[i].size() != index.vectors_[0].size()) {
      throw std::invalid_argument("embedding vectors have mixed dimensions");
    }
  }
  return index;
}

std::size_t DenseIndex::dimension() const {
  return vectors_.empty() ? 0 : vectors_[0].size();
}

double DenseIndex::similarity(std::span<const double> query_vec,
                              std::size_t idx) const {
  if (idx >= vectors_.size()) {
    throw std::out_of_range("chunk ordinal out of range");
  }
  const auto& v = vectors_[idx];
  if (query_vec.size() != v.size()) {
    throw std::invalid_argument("embedding dimension mismatch: query " +
                                std::to_string(query_vec.size()) + " vs index " +
                                std::to_string(v.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += query_vec[i] * v[i];
  return dot;
}

// ---------------------------------------------------------------------------
// Scoring pieces

void HybridConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("lambda must be in [0,1]");
  }
  if (beta < 0.0 || beta > 1.0) {
    throw std::invalid_argument("beta must be in [0,1]");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (neutral_loc_sim < 0.0 || neutral_loc_sim > 1.0) {
    throw std::invalid_argument("neutral_loc_sim must be in [0,1]");
  }
  if (bm25.k1 < 0.0) throw std::invalid_argument("k1 must be non-negative");
  if (bm25.b < 0.0 || bm25.b > 1.0) {
    throw std::invalid_argument("b must be in [0,1]");
  }
  if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
}

double base_hybrid_score(double sparse_norm, double dense_norm, double lambda) {
  return lambda * sparse_norm + (1.0 - lambda) * dense_norm;
}

namespace {

double tag_match(const geo::GeoTag& query, const geo::GeoTag& chunk) {
  if (query.country != chunk.country) return 0.0;
  if (query.adm1 == chunk.adm1) return 1.0;
  return 0.5;
}

}  // namespace

double loc_sim(const std::vector<geo::GeoTag>& query_geo,
               const std::vector<geo::GeoTag>& chunk_geo, double neutral) {
  if (query_geo.empty()) return neutral;
  double total = 0.0;
  for (const auto& q : query_geo) {
    double best = 0.0;
    for (const auto& c : chunk_geo) best = std::max(best, tag_match(q, c));
    total += best;
  }
  return total / static_cast<double>(query_geo.size());
}

double location_weighted_score(double base, double locsim, double beta) {
  return (1.0 - beta) * base + beta * locsim;
}

// ---------------------------------------------------------------------------
// Retriever

Retriever::Retriever(const corpus::CorpusStore& store, const SparseIndex& sparse,
                     const DenseIndex& dense, const geo::Gazetteer& gazetteer,
                     llm::Gateway& gateway)
    : store_(store), sparse_(sparse), dense_(dense), gazetteer_(gazetteer),
      gateway_(gateway) {}

std::vector<RetrievalCandidate> Retriever::retrieve(
    std::string_view question, const HybridConfig& config) const {
  return retrieve(question, config, {});
}

std::vector<RetrievalCandidate> Retriever::retrieve(
    std::string_view question, const HybridConfig& config,
    const std::vector<geo::GeoTag>& fallback_geo) const {
  config.validate();
  const auto& chunks = store_.chunks();
  if (chunks.empty()) return {};

  std::vector<std::string> terms = text::tokenize(question);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  auto query_vec = gateway_.embed({std::string(question)})[0];

  std::vector<geo::GeoTag> query_geo =
      geo::extract_query_locations(question, gazetteer_);
  if (query_geo.empty()) query_geo = fallback_geo;

  const std::size_t n = chunks.size();
  std::vector<double> raw_sparse(n), raw_dense(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw_sparse[i] = sparse_.score_at(terms, i, config.bm25);
    raw_dense[i] = dense_.similarity(query_vec, i);
  }

  // Union of each channel's top pool_size, ranked score desc / chunk id asc.
  auto top_of = [&](const std::vector<double>& scores) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return chunks[a].chunk_id < chunks[b].chunk_id;
    });
    if (order.size() > config.pool_size) order.resize(config.pool_size);
    return order;
  };
  std::set<std::size_t> pool;
  for (auto i : top_of(raw_sparse)) pool.insert(i);
  for (auto i : top_of(raw_dense)) pool.insert(i);

  auto channel_norm = [&](const std::vector<double>& scores) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (auto i : pool) {
      if (first) {
        lo = hi = scores[i];
        first = false;
      } else {
        lo = std::min(lo, scores[i]);
        hi = std::max(hi, scores[i]);
      }
    }
    return std::pair<double, double>(lo, hi);
  };
  auto [s_lo, s_hi] = channel_norm(raw_sparse);
  auto [d_lo, d_hi] = channel_norm(raw_dense);
  auto normalize = [](double x, double lo, double hi) {
    // A flat channel carries no ranking signal; pin it mid-scale.
    if (hi == lo) return 0.5;
    return (x - lo) / (hi - lo);
  };

  std::vector<RetrievalCandidate> candidates;
  candidates.reserve(pool.size());
  for (auto i : pool) {
    RetrievalCandidate cand;
    cand.chunk_id = chunks[i].chunk_id;
    cand.sparse_score = raw_sparse[i];
    cand.dense_score = raw_dense[i];
    cand.sparse_norm = normalize(raw_sparse[i], s_lo, s_hi);
    cand.dense_norm = normalize(raw_dense[i], d_lo, d_hi);
    cand.base_hybrid_score =
        base_hybrid_score(cand.sparse_norm, cand.dense_norm, config.lambda);
    cand.loc_sim = loc_sim(query_geo, chunks[i].geo, config.neutral_loc_sim);
    cand.final_score =
        location_weighted_score(cand.base_hybrid_score, cand.loc_sim, config.beta);
    candidates.push_back(std::move(cand));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const RetrievalCandidate& a, const RetrievalCandidate& b) {
              if (a.final_score != b.final_score) {
                return a.final_score > b.final_score;
              }
              return a.chunk_id < b.chunk_id;
            });
  if (candidates.size() > static_cast<std::size_t>(config.k)) {
    candidates.resize(static_cast<std::size_t>(config.k));
  }
  return candidates;
}

}  // namespace adaptqa::retrieval

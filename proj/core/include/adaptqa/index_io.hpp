#pragma once

#include <filesystem>
#include <memory>

#include "adaptqa/corpus.hpp"
#include "adaptqa/retrieval.hpp"

namespace adaptqa {

/// Everything a retrieval session needs, bundled so it loads as a unit.
struct CorpusIndex {
  corpus::CorpusStore store;
  retrieval::SparseIndex sparse;
  retrieval::DenseIndex dense;
  corpus::ChunkPolicy policy;
};

/// Versioned on-disk index (opaque JSON): documents, chunks with spans,
/// dense vectors and the embedder identity. The sparse index is rebuilt
/// from chunk texts at load time; a rebuild from the corpus file is always
/// authoritative.
void save_index(const std::filesystem::path& file, const CorpusIndex& index);

/// Throws std::runtime_error on unreadable files, version mismatch, or an
/// embedder mismatch against `expected_embedder` (empty = accept any).
std::unique_ptr<CorpusIndex> load_index(const std::filesystem::path& file,
                                        const std::string& expected_embedder = "");

}  // namespace adaptqa

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adaptqa/climate.hpp"
#include "adaptqa/corpus.hpp"
#include "adaptqa/gateway.hpp"
#include "adaptqa/retrieval.hpp"

namespace adaptqa::gen {

enum class EvidenceKind { literature, data };

struct EvidenceItem {
  int ref_number = 0;  // 1..n, consecutive, never reassigned
  EvidenceKind kind = EvidenceKind::literature;
  std::string payload_id;  // chunk_id or snippet_id, unique per chain
  std::string display_text;
  std::string source_label;  // title (year) or data provenance
};

/// Unified, stably numbered evidence list. Append-only: existing items keep
/// their numbers when the chain grows across loop iterations.
class EvidenceChain {
 public:
  const std::vector<EvidenceItem>& items() const { return items_; }
  bool contains(std::string_view payload_id) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  std::string question;

  /// Appends with the next ref number unless the payload is already present.
  void append(EvidenceKind kind, std::string payload_id, std::string display_text,
              std::string source_label);

 private:
  std::vector<EvidenceItem> items_;
};

/// Literature chunks first, then data snippets, numbered after any existing
/// items; payloads already in the chain are skipped.
EvidenceChain assemble_evidence_chain(
    const std::vector<corpus::Chunk>& chunks,
    const std::vector<climate::DataSnippet>& snippets,
    const corpus::CorpusStore* store = nullptr,
    const EvidenceChain* existing = nullptr);

/// Three-layer structured generation prompt (structure & clarity,
/// scientific reasoning & citations with the unified numbering rule,
/// specific & localized advice) around the evidence block and question.
/// Deterministic render; throws std::invalid_argument on an empty chain.
std::string build_scholarguide_prompt(std::string_view question,
                                      const EvidenceChain& chain);

/// Fallback when retrieval produced nothing: same framing and layers, no
/// evidence block, and an explicit instruction to flag the missing evidence.
std::string build_no_evidence_prompt(std::string_view question);

struct AnswerDraft {
  std::string text;
  std::set<int> cited;  // parsed "[n]" markers, always derived from text
  int iteration = 0;

  static AnswerDraft from_text(std::string text, int iteration);
};

/// One generation call; the draft's cited set is parsed from the reply.
AnswerDraft generate_answer(const std::string& prompt, llm::Gateway& gateway,
                            const std::string& model, int iteration);

struct SufficiencyVerdict {
  bool sufficient = true;
  std::vector<std::string> gaps;
  std::vector<std::string> sub_questions;  // empty whenever sufficient
};

/// Constrained verdict prompt; an unparseable reply counts as sufficient
/// (termination bias) with a warning. Sub-questions are truncated to
/// `max_subq`.
SufficiencyVerdict check_sufficiency(std::string_view question,
                                     const AnswerDraft& draft,
                                     const EvidenceChain& chain,
                                     llm::Gateway& gateway,
                                     const std::string& model, int max_subq,
                                     std::vector<std::string>* warnings = nullptr);

struct CitationReport {
  std::vector<int> dangling;                  // markers with no chain item
  std::vector<std::string> uncited_sentences; // declarative, no marker
  std::vector<int> unused_refs;               // chain items never cited
  std::size_t declarative_sentences = 0;
  std::size_t cited_sentences = 0;

  bool clean() const {
    return dangling.empty() && uncited_sentences.empty() && unused_refs.empty();
  }
};

/// Advisory hygiene report; it never triggers regeneration.
CitationReport verify_citations(const AnswerDraft& draft,
                                const EvidenceChain& chain);

enum class AnswerStatus { sufficient, budget_exhausted, degraded };
std::string_view to_string(AnswerStatus s);

struct RetrievalTrace {
  std::string query;
  std::vector<retrieval::RetrievalCandidate> candidates;
};

struct IterationTrace {
  int index = 0;
  std::vector<RetrievalTrace> retrievals;
  std::vector<std::string> climate_notes;
  std::size_t data_snippets = 0;
  std::size_t chain_size = 0;
  std::string prompt;
  std::string draft;
  SufficiencyVerdict verdict;
  std::vector<std::string> warnings;
};

struct SessionTrace {
  std::string question;
  std::vector<IterationTrace> iterations;
  std::vector<std::string> warnings;
};

struct FinalAnswer {
  std::string text;
  EvidenceChain chain;
  CitationReport report;
  AnswerStatus status = AnswerStatus::sufficient;
  SessionTrace trace;
};

struct LoopConfig {
  int max_iterations = 3;
  int max_subq = 2;
  bool climate_enabled = true;
  retrieval::HybridConfig retrieval;
  std::string generation_model;
  std::string sufficiency_model;
};

struct Services {
  const retrieval::Retriever* retriever = nullptr;
  llm::Gateway* gateway = nullptr;
  const geo::Gazetteer* gazetteer = nullptr;
  const climate::ClimatePipeline* climate = nullptr;  // optional
};

/// The reasoning-retrieval loop: retrieve (plus climate data on the first
/// pass), assemble, prompt, generate, check sufficiency; insufficient
/// verdicts spawn sub-question retrievals that extend the chain. Terminates
/// on a sufficient verdict or after max_iterations (budget-exhausted). A
/// gateway hard failure degrades to the best draft so far; failing before
/// any draft exists rethrows.
FinalAnswer react_loop(std::string_view question, const LoopConfig& config,
                       const Services& services);

/// Deterministic JSON rendering of a finished session (no timestamps, no
/// absolute paths) for audit and replay.
std::string trace_to_json(const FinalAnswer& answer);

}  // namespace adaptqa::gen

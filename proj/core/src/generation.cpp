#include "adaptqa/generation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adaptqa/text.hpp"

namespace adaptqa::gen {

using nlohmann::json;

// ---------------------------------------------------------------------------
// EvidenceChain

bool EvidenceChain::contains(std::string_view payload_id) const {
  return std::any_of(items_.begin(), items_.end(), [&](const EvidenceItem& it) {
    return it.payload_id == payload_id;
  });
}

void EvidenceChain::append(EvidenceKind kind, std::string payload_id,
                           std::string display_text, std::string source_label) {
  if (contains(payload_id)) return;
  EvidenceItem item;
  item.ref_number = static_cast<int>(items_.size()) + 1;
  item.kind = kind;
  item.payload_id = std::move(payload_id);
  item.display_text = std::move(display_text);
  item.source_label = std::move(source_label);
  items_.push_back(std::move(item));
}

EvidenceChain assemble_evidence_chain(
    const std::vector<corpus::Chunk>& chunks,
    const std::vector<climate::DataSnippet>& snippets,
    const corpus::CorpusStore* store, const EvidenceChain* existing) {
  EvidenceChain chain;
  if (existing) chain = *existing;
  for (const auto& chunk : chunks) {
    std::string label = store ? store->source_label(chunk) : chunk.doc_id;
    chain.append(EvidenceKind::literature, chunk.chunk_id, chunk.text,
                 std::move(label));
  }
  for (const auto& snippet : snippets) {
    chain.append(EvidenceKind::data, snippet.snippet_id, snippet.text,
                 snippet.record.provenance);
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Prompts

namespace {

constexpr std::string_view kRoleFraming =
    "You are an academic writing coach helping farmer advisors turn climate "
    "adaptation evidence into credible, readable guidance.";

constexpr std::string_view kLayerOne =
    "Layer 1 - Structure and clarity:\n"
    "- Open with a one-sentence summary of the recommendation.\n"
    "- Develop one idea per paragraph, in the order a practitioner would act "
    "on them.\n"
    "- Prefer short, direct sentences over academic hedging.";

constexpr std::string_view kLayerTwo =
    "Layer 2 - Scientific reasoning and citations:\n"
    "- Support every factual statement with a citation marker [n] taken from "
    "the numbered evidence list below.\n"
    "- Use only the list's unified numbering; never invent, merge, or "
    "renumber references.\n"
    "- Reason from the evidence; when sources disagree, say so and cite both.";

constexpr std::string_view kLayerThree =
    "Layer 3 - Specific and localized advice:\n"
    "- Anchor recommendations to the locations named in the question and "
    "favour evidence from those regions.\n"
    "- Quantify where the evidence allows (amounts, dates, thresholds) "
    "instead of generic advice.";

}  // namespace

std::string build_scholarguide_prompt(std::string_view question,
                                      const EvidenceChain& chain) {
  if (chain.empty()) {
    throw std::invalid_argument(
        "evidence chain is empty; use the no-evidence prompt variant");
  }
  std::vector<const EvidenceItem*> ordered;
  ordered.reserve(chain.size());
  for (const auto& item : chain.items()) ordered.push_back(&item);
  std::sort(ordered.begin(), ordered.end(),
            [](const EvidenceItem* a, const EvidenceItem* b) {
              return a->ref_number < b->ref_number;
            });

  std::string prompt;
  prompt += kRoleFraming;
  prompt += "\n\n";
  prompt += kLayerOne;
  prompt += "\n\n";
  prompt += kLayerTwo;
  prompt += "\n\n";
  prompt += kLayerThree;
  prompt += "\n\nEvidence:\n";
  for (const EvidenceItem* item : ordered) {
    prompt += "[" + std::to_string(item->ref_number) + "] " + item->display_text +
              " (" + item->source_label + ")\n";
  }
  prompt += "\nQuestion: " + std::string(question) + "\n\nAnswer:";
  return prompt;
}

std::string build_no_evidence_prompt(std::string_view question) {
  std::string prompt;
  prompt += kRoleFraming;
  prompt += "\n\n";
  prompt += kLayerOne;
  prompt += "\n\n";
  prompt += kLayerTwo;
  prompt += "\n\n";
  prompt += kLayerThree;
  prompt +=
      "\n\nNo evidence could be retrieved for this question. State that "
      "explicitly, answer only from general knowledge, and do not fabricate "
      "citations.\n\nQuestion: " +
      std::string(question) + "\n\nAnswer:";
  return prompt;
}

// ---------------------------------------------------------------------------
// Drafts and verdicts

AnswerDraft AnswerDraft::from_text(std::string text, int iteration) {
  AnswerDraft draft;
  draft.cited = text::citation_markers(text);
  draft.text = std::move(text);
  draft.iteration = iteration;
  return draft;
}

AnswerDraft generate_answer(const std::string& prompt, llm::Gateway& gateway,
                            const std::string& model, int iteration) {
  llm::ModelRequest request;
  request.purpose = llm::Purpose::generation;
  request.model = model;
  request.prompt = prompt;
  request.shape_hint = "cited answer";
  return AnswerDraft::from_text(gateway.complete(request), iteration);
}

namespace {

std::string sufficiency_prompt(std::string_view question,
                               const AnswerDraft& draft,
                               const EvidenceChain& chain) {
  std::string prompt =
      "Judge whether the draft answer below fully answers the question from "
      "the available evidence.\n"
      "Respond with exactly these lines:\n"
      "sufficient: yes|no\n"
      "gap: <description>         (zero or more lines, only when insufficient)\n"
      "subquestion: <question>    (zero or more lines, only when insufficient)\n\n";
  prompt += "Question: " + std::string(question) + "\n";
  prompt += "Evidence items: " + std::to_string(chain.size()) + "\n";
  prompt += "Draft answer:\n" + draft.text + "\n";
  return prompt;
}

}  // namespace

SufficiencyVerdict check_sufficiency(std::string_view question,
                                     const AnswerDraft& draft,
                                     const EvidenceChain& chain,
                                     llm::Gateway& gateway,
                                     const std::string& model, int max_subq,
                                     std::vector<std::string>* warnings) {
  llm::ModelRequest request;
  request.purpose = llm::Purpose::sufficiency;
  request.model = model;
  request.prompt = sufficiency_prompt(question, draft, chain);
  request.shape_hint = "key-value verdict";
  std::string response = gateway.complete(request);

  SufficiencyVerdict verdict;
  bool parsed = false;
  std::istringstream in(response);
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = text::casefold(text::trim(line.substr(0, colon)));
    std::string value = text::trim(line.substr(colon + 1));
    if (key == "sufficient") {
      std::string folded = text::casefold(value);
      if (folded == "yes" || folded == "true") {
        verdict.sufficient = true;
        parsed = true;
      } else if (folded == "no" || folded == "false") {
        verdict.sufficient = false;
        parsed = true;
      }
    } else if (key == "gap" && !value.empty()) {
      verdict.gaps.push_back(value);
    } else if (key == "subquestion" && !value.empty()) {
      verdict.sub_questions.push_back(value);
    }
  }
  if (!parsed) {
    // Fail-safe termination bias: unparseable verdicts end the loop.
    if (warnings) {
      warnings->push_back(
          "sufficiency verdict was unparseable; treating the answer as "
          "sufficient");
    }
    return SufficiencyVerdict{};
  }
  if (verdict.sufficient) {
    verdict.sub_questions.clear();
    verdict.gaps.clear();
  } else if (static_cast<int>(verdict.sub_questions.size()) > max_subq) {
    verdict.sub_questions.resize(static_cast<std::size_t>(max_subq));
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Citation verification

CitationReport verify_citations(const AnswerDraft& draft,
                                const EvidenceChain& chain) {
  CitationReport report;
  const int n = static_cast<int>(chain.size());
  for (int marker : draft.cited) {
    if (marker < 1 || marker > n) report.dangling.push_back(marker);
  }
  for (const auto& sentence : text::split_sentences(draft.text)) {
    if (!text::is_declarative(sentence)) continue;
    ++report.declarative_sentences;
    if (text::citation_markers(sentence).empty()) {
      report.uncited_sentences.push_back(sentence);
    } else {
      ++report.cited_sentences;
    }
  }
  for (const auto& item : chain.items()) {
    if (!draft.cited.count(item.ref_number)) {
      report.unused_refs.push_back(item.ref_number);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// ReAct loop

std::string_view to_string(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::sufficient: return "sufficient";
    case AnswerStatus::budget_exhausted: return "budget-exhausted";
    case AnswerStatus::degraded: return "degraded";
  }
  return "unknown";
}

FinalAnswer react_loop(std::string_view question, const LoopConfig& config,
                       const Services& services) {
  if (!services.retriever || !services.gateway) {
    throw std::invalid_argument("react_loop requires a retriever and a gateway");
  }
  if (config.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }

  FinalAnswer result;
  result.trace.question = std::string(question);
  EvidenceChain chain;
  chain.question = std::string(question);

  std::vector<geo::GeoTag> parent_geo;
  if (services.gazetteer) {
    parent_geo = geo::extract_query_locations(question, *services.gazetteer);
  }

  std::optional<AnswerDraft> best_draft;
  std::vector<std::string> pending_queries{std::string(question)};
  bool first_pass = true;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    IterationTrace iter;
    iter.index = iteration;
    try {
      // Retrieval for the pending queries (question first, then any
      // sub-questions from the previous verdict).
      std::vector<corpus::Chunk> new_chunks;
      for (const auto& query : pending_queries) {
        RetrievalTrace rt;
        rt.query = query;
        rt.candidates =
            services.retriever->retrieve(query, config.retrieval, parent_geo);
        for (const auto& cand : rt.candidates) {
          if (const corpus::Chunk* chunk =
                  services.retriever->store().find_chunk(cand.chunk_id)) {
            new_chunks.push_back(*chunk);
          }
        }
        iter.retrievals.push_back(std::move(rt));
      }
      pending_queries.clear();

      // Climate data joins the chain on the first pass only.
      std::vector<climate::DataSnippet> snippets;
      if (first_pass && config.climate_enabled && services.climate) {
        snippets = services.climate->run(question, iter.climate_notes);
        iter.data_snippets = snippets.size();
      }
      first_pass = false;

      chain = assemble_evidence_chain(new_chunks, snippets,
                                      &services.retriever->store(), &chain);
      iter.chain_size = chain.size();

      iter.prompt = chain.empty() ? build_no_evidence_prompt(question)
                                  : build_scholarguide_prompt(question, chain);
      AnswerDraft draft = generate_answer(iter.prompt, *services.gateway,
                                          config.generation_model, iteration);
      iter.draft = draft.text;
      best_draft = draft;

      iter.verdict =
          check_sufficiency(question, draft, chain, *services.gateway,
                            config.sufficiency_model, config.max_subq,
                            &iter.warnings);
      result.trace.iterations.push_back(iter);

      if (iter.verdict.sufficient) {
        result.status = AnswerStatus::sufficient;
        break;
      }
      result.status = AnswerStatus::budget_exhausted;
      pending_queries = iter.verdict.sub_questions;
    } catch (const llm::GatewayError& err) {
      iter.warnings.push_back(std::string("gateway failure: ") + err.what());
      result.trace.iterations.push_back(iter);
      if (!best_draft) throw;  // nothing to degrade to
      result.status = AnswerStatus::degraded;
      result.trace.warnings.push_back(
          "loop degraded after a gateway failure; returning the best draft");
      break;
    }
  }

  result.text = best_draft ? best_draft->text : "";
  result.chain = chain;
  result.report = verify_citations(
      best_draft ? *best_draft : AnswerDraft{}, chain);
  return result;
}

// ---------------------------------------------------------------------------
// Trace serialization

namespace {

json verdict_to_json(const SufficiencyVerdict& v) {
  return json{{"sufficient", v.sufficient},
              {"gaps", v.gaps},
              {"sub_questions", v.sub_questions}};
}

json candidates_to_json(const std::vector<retrieval::RetrievalCandidate>& cands) {
  json arr = json::array();
  for (const auto& c : cands) {
    arr.push_back(json{{"chunk_id", c.chunk_id},
                       {"sparse", c.sparse_score},
                       {"dense", c.dense_score},
                       {"sparse_norm", c.sparse_norm},
                       {"dense_norm", c.dense_norm},
                       {"base", c.base_hybrid_score},
                       {"loc_sim", c.loc_sim},
                       {"final", c.final_score}});
  }
  return arr;
}

}  // namespace

std::string trace_to_json(const FinalAnswer& answer) {
  json iterations = json::array();
  for (const auto& iter : answer.trace.iterations) {
    json retrievals = json::array();
    for (const auto& rt : iter.retrievals) {
      retrievals.push_back(json{{"query", rt.query},
                                {"candidates", candidates_to_json(rt.candidates)}});
    }
    iterations.push_back(json{{"index", iter.index},
                              {"retrievals", retrievals},
                              {"climate_notes", iter.climate_notes},
                              {"data_snippets", iter.data_snippets},
                              {"chain_size", iter.chain_size},
                              {"prompt", iter.prompt},
                              {"draft", iter.draft},
                              {"verdict", verdict_to_json(iter.verdict)},
                              {"warnings", iter.warnings}});
  }
  json chain = json::array();
  for (const auto& item : answer.chain.items()) {
    chain.push_back(json{
        {"ref", item.ref_number},
        {"kind", item.kind == EvidenceKind::literature ? "literature" : "data"},
        {"payload_id", item.payload_id},
        {"text", item.display_text},
        {"source", item.source_label}});
  }
  json report = {{"dangling", answer.report.dangling},
                 {"uncited_sentences", answer.report.uncited_sentences},
                 {"unused_refs", answer.report.unused_refs},
                 {"declarative_sentences", answer.report.declarative_sentences},
                 {"cited_sentences", answer.report.cited_sentences}};
  json doc = {{"version", 1},
              {"question", answer.trace.question},
              {"status", std::string(to_string(answer.status))},
              {"iterations", iterations},
              {"chain", chain},
              {"answer", answer.text},
              {"citation_report", report},
              {"warnings", answer.trace.warnings}};
  return doc.dump(2) + "\n";
}

}  // namespace adaptqa::gen

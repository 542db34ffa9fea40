#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptqa/agreement.hpp"
#include "adaptqa/gateway.hpp"
#include "adaptqa/generation.hpp"

namespace adaptqa::eval {

/// Seven-dimension 0-3 assessment; a dimension the evaluator failed to
/// score (after one retry) is simply absent.
struct RubricScore {
  std::map<std::string, int> scores;
  std::map<std::string, std::string> rationales;

  std::optional<int> get(std::string_view dimension) const;
};

struct Exemplar {
  std::string question;
  std::string answer;
  std::map<std::string, int> scores;
};

/// Built-in bundle of five annotated examples for few-shot scoring.
const std::vector<Exemplar>& default_exemplars();

enum class ScoringMode { zero_shot, few_shot };
std::optional<ScoringMode> scoring_mode_from_string(std::string_view s);
std::string_view to_string(ScoringMode mode);

struct RubricOptions {
  ScoringMode mode = ScoringMode::zero_shot;
  std::vector<Exemplar> exemplars;  // required (and defaulted) for few-shot
  std::string model;                // evaluator model identity
};

class ScoringError : public std::runtime_error {
 public:
  explicit ScoringError(const std::string& what) : std::runtime_error(what) {}
};

/// Prompts the gateway once per dimension with the rubric definition;
/// integer parse enforced with one retry. Throws ScoringError when every
/// dimension ends up missing.
RubricScore score_rubric(std::string_view question, std::string_view answer,
                         const gen::EvidenceChain* chain, llm::Gateway& gateway,
                         const RubricOptions& options,
                         std::vector<std::string>* warnings = nullptr);

struct ClaimCheck {
  std::string claim;
  bool supported = false;
  int supporting_ref = 0;  // 0 = none
};

struct RagasResult {
  double score = 1.0;  // supported / total; 1.0 for zero claims
  std::vector<ClaimCheck> claims;
};

class ClaimDecompositionError : public std::runtime_error {
 public:
  explicit ClaimDecompositionError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Decompose the answer into atomic claims (gateway, "claim: ..." lines).
/// Throws ClaimDecompositionError when decomposition fails; the metric is
/// then reported missing.
std::vector<std::string> decompose_claims(std::string_view answer,
                                          llm::Gateway& gateway,
                                          const std::string& model);

/// Deterministic support check: a claim is supported when the fraction of
/// its content words contained in a single evidence item's text reaches
/// theta.
bool claim_supported(std::string_view claim, const gen::EvidenceChain& chain,
                     double theta, int* supporting_ref = nullptr);

/// The automatic faithfulness metric: claims from the gateway, deterministic
/// containment support check, score = supported / total.
RagasResult ragas_faithfulness(std::string_view answer,
                               const gen::EvidenceChain& chain,
                               llm::Gateway& gateway, double theta,
                               const std::string& model);

/// LLM-based assessor: one constrained prompt for a support fraction,
/// parsed and clamped to [0,1]. Missing after a retry.
std::optional<double> llm_faithfulness(std::string_view answer,
                                       const gen::EvidenceChain& chain,
                                       llm::Gateway& gateway,
                                       const std::string& model);

/// alpha * s_ragas + (1 - alpha) * s_llm.
double hybrid_faithfulness(double s_ragas, double s_llm, double alpha);

/// Fraction of declarative sentences carrying at least one citation marker;
/// 0 when there are none.
double citation_rate(std::string_view answer);

struct FaithfulnessBreakdown {
  std::optional<double> s_ragas;
  std::optional<double> s_llm;
  double alpha = 0.5;
  std::optional<double> s_faithful;  // present only when both inputs are
  double citation_rate = 0.0;
  std::vector<ClaimCheck> claims;
};

/// Convenience wrapper computing the full breakdown for one answer.
FaithfulnessBreakdown assess_faithfulness(std::string_view answer,
                                          const gen::EvidenceChain& chain,
                                          llm::Gateway& gateway, double alpha,
                                          double theta,
                                          const std::string& model,
                                          std::vector<std::string>* warnings = nullptr);

}  // namespace adaptqa::eval

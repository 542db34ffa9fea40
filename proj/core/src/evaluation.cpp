#include "adaptqa/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "adaptqa/text.hpp"

namespace adaptqa::eval {

std::optional<int> RubricScore::get(std::string_view dimension) const {
  auto it = scores.find(std::string(dimension));
  if (it == scores.end()) return std::nullopt;
  return it->second;
}

std::optional<ScoringMode> scoring_mode_from_string(std::string_view s) {
  if (s == "zero-shot" || s == "zero_shot") return ScoringMode::zero_shot;
  if (s == "few-shot" || s == "few_shot") return ScoringMode::few_shot;
  return std::nullopt;
}

std::string_view to_string(ScoringMode mode) {
  return mode == ScoringMode::zero_shot ? "zero-shot" : "few-shot";
}

namespace {

const std::map<std::string, std::string, std::less<>>& rubric_definitions() {
  static const std::map<std::string, std::string, std::less<>> defs = {
      {"context",
       "Context: does the answer engage with the situation behind the "
       "question (0 = ignores it, 3 = fully situated)?"},
      {"structure",
       "Structure: is the answer logically organized with a clear flow "
       "(0 = disordered, 3 = well structured)?"},
      {"language",
       "Language: is the writing fluent and accessible to a practitioner "
       "(0 = unreadable, 3 = fluent)?"},
      {"comprehensiveness",
       "Comprehensiveness: does the answer cover the important aspects "
       "(0 = misses most, 3 = covers all key aspects)?"},
      {"specificity",
       "Specificity: is the advice concrete and tailored, including to the "
       "locations in the question (0 = generic, 3 = precise and local)?"},
      {"citations",
       "Citations: are factual statements grounded in the numbered evidence "
       "(0 = uncited or wrong, 3 = consistently and correctly cited)?"},
      {"accuracy",
       "Accuracy: are the statements factually correct given the evidence "
       "(0 = wrong, 3 = accurate throughout)?"},
  };
  return defs;
}

std::string rubric_prompt(std::string_view question, std::string_view answer,
                          const gen::EvidenceChain* chain,
                          std::string_view dimension,
                          const RubricOptions& options,
                          const std::string& error_echo) {
  std::string prompt = "You are grading an answer to a climate adaptation "
                       "question on one rubric dimension.\n";
  prompt += rubric_definitions().at(std::string(dimension));
  prompt += "\nRespond with a single integer from 0 to 3.\n";
  if (options.mode == ScoringMode::few_shot) {
    prompt += "\nScored examples:\n";
    for (const auto& ex : options.exemplars) {
      auto it = ex.scores.find(std::string(dimension));
      if (it == ex.scores.end()) continue;
      prompt += "Question: " + ex.question + "\nAnswer: " + ex.answer +
                "\nScore: " + std::to_string(it->second) + "\n\n";
    }
  }
  if (!error_echo.empty()) {
    prompt += "\nYour previous reply was invalid: " + error_echo + "\n";
  }
  prompt += "\nQuestion: " + std::string(question) + "\n";
  if (chain && !chain->empty()) {
    prompt += "Evidence:\n";
    for (const auto& item : chain->items()) {
      prompt += "[" + std::to_string(item.ref_number) + "] " + item.display_text +
                "\n";
    }
  }
  prompt += "Answer:\n" + std::string(answer) + "\n\nScore:";
  return prompt;
}

/// First integer token in the reply, or nullopt.
std::optional<int> parse_integer(std::string_view response) {
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(response[i])) ||
        (response[i] == '-' && i + 1 < response.size() &&
         std::isdigit(static_cast<unsigned char>(response[i + 1])))) {
      std::size_t end = i + (response[i] == '-' ? 1 : 0);
      while (end < response.size() &&
             std::isdigit(static_cast<unsigned char>(response[end]))) {
        ++end;
      }
      try {
        return std::stoi(std::string(response.substr(i, end - i)));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

std::optional<double> parse_fraction(std::string_view response) {
  for (std::size_t i = 0; i < response.size(); ++i) {
    char c = response[i];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < response.size() &&
         std::isdigit(static_cast<unsigned char>(response[i + 1])))) {
      std::size_t end = i;
      bool dot_seen = false;
      while (end < response.size() &&
             (std::isdigit(static_cast<unsigned char>(response[end])) ||
              (response[end] == '.' && !dot_seen))) {
        if (response[end] == '.') dot_seen = true;
        ++end;
      }
      try {
        return std::stod(std::string(response.substr(i, end - i)));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

const std::vector<Exemplar>& default_exemplars() {
  static const std::vector<Exemplar> exemplars = [] {
    std::vector<Exemplar> out;
    auto add = [&](std::string q, std::string a, int c, int s, int l, int co,
                   int sp, int ci, int ac) {
      Exemplar ex;
      ex.question = std::move(q);
      ex.answer = std::move(a);
      ex.scores = {{"context", c},       {"structure", s},
                   {"language", l},      {"comprehensiveness", co},
                   {"specificity", sp},  {"citations", ci},
                   {"accuracy", ac}};
      out.push_back(std::move(ex));
    };
    add("When should wheat be sown in a drying climate?",
        "Sow earlier in the season to use stored winter moisture [1]. Trials "
        "show a 10-14 day shift preserves yield under reduced spring rain [2].",
        3, 3, 3, 2, 3, 3, 3);
    add("Do almonds need irrigation?",
        "Almonds need water. Water them.", 1, 1, 2, 0, 0, 0, 1);
    add("How can orchards cope with heat waves?",
        "Shade netting reduces canopy temperature by several degrees [1], and "
        "evaporative cooling protects fruit during extreme days [2]. Both "
        "measures preserve packable yield [3].",
        2, 3, 3, 2, 2, 3, 3);
    add("What cover crops suit drier winters?",
        "Several options exist depending on region and soil. Legumes help "
        "nitrogen. There are many considerations.",
        1, 1, 2, 1, 0, 0, 2);
    add("Is irrigation scheduling worth automating for vineyards?",
        "Sensor-driven scheduling cut water use by about 20% without yield "
        "loss in semi-arid trials [1]. Payback typically arrives within three "
        "seasons for blocks over five hectares [2].",
        3, 3, 3, 3, 3, 3, 3);
    return out;
  }();
  return exemplars;
}

RubricScore score_rubric(std::string_view question, std::string_view answer,
                         const gen::EvidenceChain* chain, llm::Gateway& gateway,
                         const RubricOptions& options,
                         std::vector<std::string>* warnings) {
  RubricOptions effective = options;
  if (effective.mode == ScoringMode::few_shot && effective.exemplars.empty()) {
    effective.exemplars = default_exemplars();
  }
  RubricScore result;
  for (const auto dim : kRubricDimensions) {
    std::string error_echo;
    std::optional<int> score;
    for (int attempt = 0; attempt < 2 && !score; ++attempt) {
      llm::ModelRequest request;
      request.purpose = llm::Purpose::rubric;
      request.model = effective.model;
      request.shape_hint = "integer 0-3";
      request.prompt =
          rubric_prompt(question, answer, chain, dim, effective, error_echo);
      std::string response = gateway.complete(request);
      auto parsed = parse_integer(response);
      if (parsed && *parsed >= 0 && *parsed <= 3) {
        score = parsed;
      } else {
        error_echo = parsed ? "score out of range 0-3" : "no integer found";
      }
    }
    if (score) {
      result.scores[std::string(dim)] = *score;
    } else if (warnings) {
      warnings->push_back("dimension '" + std::string(dim) +
                          "' unscored by evaluator '" + effective.model + "'");
    }
  }
  if (result.scores.empty()) {
    throw ScoringError("evaluator '" + effective.model +
                       "' failed to score every dimension");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Faithfulness

std::vector<std::string> decompose_claims(std::string_view answer,
                                          llm::Gateway& gateway,
                                          const std::string& model) {
  llm::ModelRequest request;
  request.purpose = llm::Purpose::claims;
  request.model = model;
  request.shape_hint = "claim list";
  request.prompt =
      "Decompose the answer below into its atomic factual claims.\n"
      "Respond with one line per claim, each of the form:\nclaim: <claim>\n"
      "Respond with 'claim: none' when the answer makes no factual claim.\n\n"
      "Answer:\n" +
      std::string(answer) + "\n";
  std::string response = gateway.complete(request);
  std::vector<std::string> claims;
  std::istringstream in(response);
  std::string line;
  bool any_line = false;
  while (std::getline(in, line)) {
    std::string trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    any_line = true;
    auto colon = trimmed.find(':');
    if (colon == std::string::npos) continue;
    std::string key = text::casefold(text::trim(trimmed.substr(0, colon)));
    if (key != "claim") continue;
    std::string value = text::trim(trimmed.substr(colon + 1));
    if (text::casefold(value) == "none") continue;
    if (!value.empty()) claims.push_back(std::move(value));
  }
  if (!any_line) {
    throw ClaimDecompositionError("claim decomposition returned no output");
  }
  return claims;
}

bool claim_supported(std::string_view claim, const gen::EvidenceChain& chain,
                     double theta, int* supporting_ref) {
  auto words = text::content_words(claim);
  if (words.empty()) return false;
  for (const auto& item : chain.items()) {
    auto evidence_words = text::content_words(item.display_text);
    std::set<std::string> vocabulary(evidence_words.begin(), evidence_words.end());
    std::size_t contained = 0;
    for (const auto& w : words) {
      if (vocabulary.count(w)) ++contained;
    }
    double fraction = static_cast<double>(contained) / words.size();
    if (fraction >= theta) {
      if (supporting_ref) *supporting_ref = item.ref_number;
      return true;
    }
  }
  return false;
}

RagasResult ragas_faithfulness(std::string_view answer,
                               const gen::EvidenceChain& chain,
                               llm::Gateway& gateway, double theta,
                               const std::string& model) {
  RagasResult result;
  auto claims = decompose_claims(answer, gateway, model);
  if (claims.empty()) {
    result.score = 1.0;  // vacuous truth: nothing claimed, nothing unfaithful
    return result;
  }
  std::size_t supported = 0;
  for (auto& claim : claims) {
    ClaimCheck check;
    check.claim = std::move(claim);
    check.supported = claim_supported(check.claim, chain, theta, &check.supporting_ref);
    if (check.supported) ++supported;
    result.claims.push_back(std::move(check));
  }
  result.score = static_cast<double>(supported) / result.claims.size();
  return result;
}

std::optional<double> llm_faithfulness(std::string_view answer,
                                       const gen::EvidenceChain& chain,
                                       llm::Gateway& gateway,
                                       const std::string& model) {
  std::string prompt =
      "Judge what fraction of the answer's factual claims is supported by the "
      "evidence. Respond with a single number between 0 and 1.\n\nEvidence:\n";
  for (const auto& item : chain.items()) {
    prompt += "[" + std::to_string(item.ref_number) + "] " + item.display_text +
              "\n";
  }
  prompt += "\nAnswer:\n" + std::string(answer) + "\n\nFraction:";
  for (int attempt = 0; attempt < 2; ++attempt) {
    llm::ModelRequest request;
    request.purpose = llm::Purpose::faithfulness;
    request.model = model;
    request.shape_hint = "fraction 0-1";
    request.prompt = prompt;
    std::string response = gateway.complete(request);
    if (auto value = parse_fraction(response)) {
      return std::clamp(*value, 0.0, 1.0);
    }
  }
  return std::nullopt;
}

double hybrid_faithfulness(double s_ragas, double s_llm, double alpha) {
  return alpha * s_ragas + (1.0 - alpha) * s_llm;
}

double citation_rate(std::string_view answer) {
  std::size_t declarative = 0;
  std::size_t cited = 0;
  for (const auto& sentence : text::split_sentences(answer)) {
    if (!text::is_declarative(sentence)) continue;
    ++declarative;
    if (!text::citation_markers(sentence).empty()) ++cited;
  }
  if (declarative == 0) return 0.0;
  return static_cast<double>(cited) / static_cast<double>(declarative);
}

FaithfulnessBreakdown assess_faithfulness(std::string_view answer,
                                          const gen::EvidenceChain& chain,
                                          llm::Gateway& gateway, double alpha,
                                          double theta, const std::string& model,
                                          std::vector<std::string>* warnings) {
  FaithfulnessBreakdown breakdown;
  breakdown.alpha = alpha;
  breakdown.citation_rate = citation_rate(answer);
  try {
    auto ragas = ragas_faithfulness(answer, chain, gateway, theta, model);
    breakdown.s_ragas = ragas.score;
    breakdown.claims = std::move(ragas.claims);
  } catch (const ClaimDecompositionError& err) {
    if (warnings) {
      warnings->push_back(std::string("automatic faithfulness missing: ") +
                          err.what());
    }
  } catch (const llm::GatewayError& err) {
    if (warnings) {
      warnings->push_back(std::string("automatic faithfulness missing: ") +
                          err.what());
    }
  }
  try {
    breakdown.s_llm = llm_faithfulness(answer, chain, gateway, model);
    if (!breakdown.s_llm && warnings) {
      warnings->push_back("llm faithfulness missing: unparseable after retry");
    }
  } catch (const llm::GatewayError& err) {
    if (warnings) {
      warnings->push_back(std::string("llm faithfulness missing: ") + err.what());
    }
  }
  if (breakdown.s_ragas && breakdown.s_llm) {
    breakdown.s_faithful =
        hybrid_faithfulness(*breakdown.s_ragas, *breakdown.s_llm, alpha);
  }
  return breakdown;
}

}  // namespace adaptqa::eval

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptqa/agreement.hpp"
#include "adaptqa/evaluation.hpp"
#include "adaptqa/generation.hpp"

namespace adaptqa::eval {

struct AnswerRecord {
  std::string answer_id;
  std::string question;
  std::string text;
  gen::EvidenceChain chain;
};

struct AnswerSet {
  std::string name;  // method / configuration label
  std::vector<AnswerRecord> answers;
};

/// JSON: {"sets": [{"name", "answers": [{"answer_id", "question", "text",
///   "evidence": [{"ref", "kind", "text", "source"}]}]}]}
std::vector<AnswerSet> load_answer_sets(const std::filesystem::path& file);

struct EvaluationOptions {
  double alpha = 0.5;
  double theta = 0.6;
  ScoringMode mode = ScoringMode::zero_shot;
  std::vector<Exemplar> exemplars;
  std::vector<std::string> evaluators;  // evaluator model identities
  std::string faithfulness_model;
  std::string claims_model;
};

struct AnswerEvaluation {
  std::string answer_id;
  FusedScores fused;
  FaithfulnessBreakdown faithfulness;
  std::vector<std::string> warnings;
};

struct ColumnStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single answer
  std::size_t n = 0;
};

struct SetSummary {
  std::string name;
  std::vector<ColumnStat> dimensions;  // report column order, then AVG
  ColumnStat avg;
  std::optional<double> cit_rate;    // mean over answers
  std::optional<double> faith_rate;  // mean over answers with both components
  std::size_t answers = 0;
};

struct EvaluationReport {
  std::vector<SetSummary> sets;
  std::vector<AnswerEvaluation> per_answer;

  /// Table 1-shaped delimited report: one row per answer set, columns
  /// Method, Context, Structure, Language, Citations, Specificity,
  /// Compreh., Accuracy, AVG, CitRate, FaithRate; footer comments state
  /// the +- and metric conventions.
  std::string to_csv() const;

  /// Same table rendered for the terminal.
  std::string to_table() const;
};

ColumnStat column_stat(const std::vector<double>& values);

/// Scores every answer with every configured evaluator, fuses the rubric
/// dimensions with the calibrated weights, and aggregates per set.
EvaluationReport evaluate_answer_sets(const std::vector<AnswerSet>& sets,
                                      const HybridEvaluatorWeights& weights,
                                      llm::Gateway& gateway,
                                      const EvaluationOptions& options);

}  // namespace adaptqa::eval

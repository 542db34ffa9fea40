#include "adaptqa/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

namespace adaptqa::eval {

using nlohmann::json;

std::vector<AnswerSet> load_answer_sets(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read answers file: " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("sets")) {
    throw std::runtime_error("answers file is not valid JSON: " + file.string());
  }
  std::vector<AnswerSet> sets;
  for (const auto& s : doc["sets"]) {
    AnswerSet set;
    set.name = s.value("name", "");
    if (set.name.empty()) {
      throw std::runtime_error("answer set without a name in " + file.string());
    }
    for (const auto& a : s.value("answers", json::array())) {
      AnswerRecord rec;
      rec.answer_id = a.value("answer_id", "");
      rec.question = a.value("question", "");
      rec.text = a.value("text", "");
      for (const auto& e : a.value("evidence", json::array())) {
        rec.chain.append(
            e.value("kind", "literature") == "data" ? gen::EvidenceKind::data
                                                    : gen::EvidenceKind::literature,
            "ref-" + std::to_string(rec.chain.size() + 1), e.value("text", ""),
            e.value("source", ""));
      }
      rec.chain.question = rec.question;
      set.answers.push_back(std::move(rec));
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

ColumnStat column_stat(const std::vector<double>& values) {
  ColumnStat stat;
  stat.n = values.size();
  if (values.empty()) return stat;
  double total = 0.0;
  for (double v : values) total += v;
  stat.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stat.mean) * (v - stat.mean);
    stat.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stat;
}

EvaluationReport evaluate_answer_sets(const std::vector<AnswerSet>& sets,
                                      const HybridEvaluatorWeights& weights,
                                      llm::Gateway& gateway,
                                      const EvaluationOptions& options) {
  if (options.evaluators.empty()) {
    throw std::runtime_error("no evaluators configured");
  }
  EvaluationReport report;
  for (const auto& set : sets) {
    // Per-dimension samples across the set's answers.
    std::map<std::string, std::vector<double>> dim_values;
    std::vector<double> avg_values, cit_values, faith_values;

    for (const auto& answer : set.answers) {
      AnswerEvaluation eval;
      eval.answer_id = answer.answer_id;

      EvaluatorScores scores;
      for (const auto& evaluator : options.evaluators) {
        RubricOptions ropts;
        ropts.mode = options.mode;
        ropts.exemplars = options.exemplars;
        ropts.model = evaluator;
        try {
          RubricScore rubric =
              score_rubric(answer.question, answer.text, &answer.chain, gateway,
                           ropts, &eval.warnings);
          scores[evaluator] = rubric.scores;
        } catch (const ScoringError& err) {
          eval.warnings.push_back(err.what());
        }
      }
      eval.fused = fuse_scores(scores, weights);
      eval.faithfulness = assess_faithfulness(
          answer.text, answer.chain, gateway, options.alpha, options.theta,
          options.faithfulness_model.empty() ? options.claims_model
                                             : options.faithfulness_model,
          &eval.warnings);

      for (const auto& [dim, value] : eval.fused.by_dimension) {
        dim_values[dim].push_back(value);
      }
      if (eval.fused.overall) avg_values.push_back(*eval.fused.overall);
      cit_values.push_back(eval.faithfulness.citation_rate);
      if (eval.faithfulness.s_faithful) {
        faith_values.push_back(*eval.faithfulness.s_faithful);
      }
      report.per_answer.push_back(std::move(eval));
    }

    SetSummary summary;
    summary.name = set.name;
    summary.answers = set.answers.size();
    for (const auto dim : kReportDimensionOrder) {
      auto it = dim_values.find(std::string(dim));
      summary.dimensions.push_back(
          it == dim_values.end() ? ColumnStat{} : column_stat(it->second));
    }
    summary.avg = column_stat(avg_values);
    if (!cit_values.empty()) summary.cit_rate = column_stat(cit_values).mean;
    if (!faith_values.empty()) summary.faith_rate = column_stat(faith_values).mean;
    report.sets.push_back(std::move(summary));
  }
  return report;
}

namespace {

constexpr std::array<std::string_view, 10> kReportColumns = {
    "Context",     "Structure", "Language", "Citations", "Specificity",
    "Compreh.",    "Accuracy",  "AVG",      "CitRate",   "FaithRate",
};

std::string cell(const ColumnStat& stat) {
  if (stat.n == 0) return "N/A";
  return fmt::format("{:.2f}±{:.2f}", stat.mean, stat.stddev);
}

std::string rate_cell(const std::optional<double>& rate) {
  if (!rate) return "N/A";
  return fmt::format("{:.3f}", *rate);
}

const char* kFooter =
    "# ± is the sample standard deviation across the answers of a set "
    "(0.00 for a single answer).\n"
    "# CitRate = fraction of declarative sentences carrying at least one "
    "citation marker, averaged over answers.\n"
    "# FaithRate = alpha*S_auto + (1-alpha)*S_llm, where S_auto checks each "
    "claim's content words for containment in a single evidence item and "
    "S_llm is the model-assessed support fraction; averaged over answers.\n"
    "# Rubric dimensions and AVG range 0-3; CitRate and FaithRate range 0-1.\n";

}  // namespace

std::string EvaluationReport::to_csv() const {
  std::string out = "Method";
  for (const auto col : kReportColumns) {
    out += ",";
    out += col;
  }
  out += "\n";
  for (const auto& set : sets) {
    out += set.name;
    for (const auto& stat : set.dimensions) out += "," + cell(stat);
    out += "," + cell(set.avg);
    out += "," + rate_cell(set.cit_rate);
    out += "," + rate_cell(set.faith_rate);
    out += "\n";
  }
  out += kFooter;
  return out;
}

std::string EvaluationReport::to_table() const {
  std::size_t name_width = 6;
  for (const auto& set : sets) name_width = std::max(name_width, set.name.size());
  std::string out = fmt::format("{:<{}}", "Method", name_width);
  for (const auto col : kReportColumns) {
    out += fmt::format("  {:>11}", col);
  }
  out += "\n";
  for (const auto& set : sets) {
    out += fmt::format("{:<{}}", set.name, name_width);
    for (const auto& stat : set.dimensions) {
      out += fmt::format("  {:>11}", cell(stat));
    }
    out += fmt::format("  {:>11}", cell(set.avg));
    out += fmt::format("  {:>11}", rate_cell(set.cit_rate));
    out += fmt::format("  {:>11}", rate_cell(set.faith_rate));
    out += "\n";
  }
  out += kFooter;
  return out;
}

}  // namespace adaptqa::eval

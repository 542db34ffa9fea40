#include "adaptqa/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "adaptqa/text.hpp"

namespace adaptqa::eval {

using nlohmann::json;

namespace {
constexpr int kCategories = 4;
}

bool is_rubric_dimension(std::string_view name) {
  return std::find(kRubricDimensions.begin(), kRubricDimensions.end(), name) !=
         kRubricDimensions.end();
}

std::optional<KappaWeighting> kappa_weighting_from_string(std::string_view s) {
  if (s == "none" || s == "unweighted") return KappaWeighting::none;
  if (s == "linear") return KappaWeighting::linear;
  if (s == "quadratic") return KappaWeighting::quadratic;
  return std::nullopt;
}

double cohen_kappa(const std::vector<int>& labels_a,
                   const std::vector<int>& labels_b, KappaWeighting weighting) {
  if (labels_a.empty()) {
    throw std::invalid_argument("cohen_kappa: empty label lists");
  }
  if (labels_a.size() != labels_b.size()) {
    throw std::invalid_argument("cohen_kappa: label lists differ in length");
  }
  double table[kCategories][kCategories] = {};
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    int a = labels_a[i];
    int b = labels_b[i];
    if (a < 0 || a >= kCategories || b < 0 || b >= kCategories) {
      throw std::invalid_argument("cohen_kappa: labels must be in {0,1,2,3}");
    }
    table[a][b] += 1.0;
  }
  const double n = static_cast<double>(labels_a.size());
  double row[kCategories] = {};
  double col[kCategories] = {};
  for (int i = 0; i < kCategories; ++i) {
    for (int j = 0; j < kCategories; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  }

  if (weighting == KappaWeighting::none) {
    double agreements = 0.0;
    double pe = 0.0;
    for (int i = 0; i < kCategories; ++i) {
      agreements += table[i][i];
      pe += (row[i] / n) * (col[i] / n);
    }
    // Single division keeps total agreement exactly 1.0.
    const double po = agreements / n;
    if (pe == 1.0) {
      // Both marginals sit on one shared category, which forces total
      // observed agreement too.
      return 1.0;
    }
    return (po - pe) / (1.0 - pe);
  }

  // Weighted variants: disagreement weights, 0 on the diagonal.
  auto weight = [&](int i, int j) {
    double d = std::abs(i - j) / static_cast<double>(kCategories - 1);
    return weighting == KappaWeighting::linear ? d : d * d;
  };
  double observed = 0.0;
  double expected = 0.0;
  for (int i = 0; i < kCategories; ++i) {
    for (int j = 0; j < kCategories; ++j) {
      observed += weight(i, j) * table[i][j] / n;
      expected += weight(i, j) * (row[i] / n) * (col[j] / n);
    }
  }
  if (expected == 0.0) {
    return 1.0;
  }
  return 1.0 - observed / expected;
}

std::pair<double, double> bootstrap_kappa_ci(const std::vector<int>& labels_a,
                                             const std::vector<int>& labels_b,
                                             int resamples, double level,
                                             std::uint64_t seed,
                                             KappaWeighting weighting) {
  if (labels_a.size() != labels_b.size()) {
    throw std::invalid_argument("bootstrap_kappa_ci: label lists differ in length");
  }
  if (labels_a.size() < 2) {
    throw std::invalid_argument("bootstrap_kappa_ci: need at least 2 pairs");
  }
  if (resamples < 1) {
    throw std::invalid_argument("bootstrap_kappa_ci: resamples must be >= 1");
  }
  if (level <= 0.0 || level >= 1.0) {
    throw std::invalid_argument("bootstrap_kappa_ci: level must be in (0,1)");
  }
  const std::size_t n = labels_a.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<int> sample_a(n), sample_b(n);
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = pick(rng);
      sample_a[i] = labels_a[j];
      sample_b[i] = labels_b[j];
    }
    stats.push_back(cohen_kappa(sample_a, sample_b, weighting));
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(stats.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    double frac = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - frac) + stats[hi] * frac;
  };
  const double tail = (1.0 - level) / 2.0;
  return {quantile(tail), quantile(1.0 - tail)};
}

// ---------------------------------------------------------------------------
// AnnotationSet

AnnotationSet AnnotationSet::load_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read annotations file: " + file.string());
  }
  std::vector<AnnotationRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = text::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(trimmed);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(text::trim(field));
    if (fields.size() != 5) {
      throw std::runtime_error("annotations line " + std::to_string(lineno) +
                               ": expected 5 comma-separated fields");
    }
    if (!header_seen) {
      header_seen = true;
      if (text::casefold(fields[0]) == "question_id") continue;  // header row
    }
    AnnotationRow row;
    row.question_id = fields[0];
    row.answer_id = fields[1];
    row.annotator_id = fields[2];
    row.dimension = text::casefold(fields[3]);
    try {
      row.score = std::stoi(fields[4]);
    } catch (const std::exception&) {
      throw std::runtime_error("annotations line " + std::to_string(lineno) +
                               ": score is not an integer");
    }
    rows.push_back(std::move(row));
  }
  return from_rows(std::move(rows));
}

AnnotationSet AnnotationSet::from_rows(std::vector<AnnotationRow> rows) {
  std::set<std::array<std::string, 4>> seen;
  for (const auto& row : rows) {
    if (row.score < 0 || row.score > 3) {
      throw std::runtime_error("annotation score out of range 0..3 for " +
                               row.question_id + "/" + row.answer_id);
    }
    auto key = std::array<std::string, 4>{row.question_id, row.answer_id,
                                          row.annotator_id, row.dimension};
    if (!seen.insert(key).second) {
      throw std::runtime_error("duplicate annotation row for " +
                               row.question_id + "/" + row.answer_id + "/" +
                               row.annotator_id + "/" + row.dimension);
    }
  }
  AnnotationSet set;
  set.rows_ = std::move(rows);
  return set;
}

std::vector<std::string> AnnotationSet::annotator_ids() const {
  std::set<std::string> ids;
  for (const auto& row : rows_) ids.insert(row.annotator_id);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> AnnotationSet::dimensions() const {
  std::set<std::string> dims;
  for (const auto& row : rows_) dims.insert(row.dimension);
  return {dims.begin(), dims.end()};
}

int consensus_label(std::vector<int> scores) {
  if (scores.empty()) {
    throw std::invalid_argument("consensus_label: no scores");
  }
  std::sort(scores.begin(), scores.end());
  return scores[(scores.size() - 1) / 2];  // lower median on even counts
}

// ---------------------------------------------------------------------------
// Calibration

std::vector<double> kappa_weights(const std::vector<double>& kappas,
                                  bool* degenerate) {
  double denom = 0.0;
  for (double k : kappas) denom += std::max(k, 0.0);
  std::vector<double> weights(kappas.size(), 0.0);
  if (denom == 0.0) {
    // Every evaluator at or below chance: fall back to uniform weights.
    if (degenerate) *degenerate = true;
    if (!kappas.empty()) {
      std::fill(weights.begin(), weights.end(), 1.0 / kappas.size());
    }
    return weights;
  }
  if (degenerate) *degenerate = false;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    weights[i] = std::max(kappas[i], 0.0) / denom;
  }
  return weights;
}

CalibrationResult calibrate_weights(const AnnotationSet& human,
                                    const AnnotationSet& evaluator_scores,
                                    const CalibrationOptions& options) {
  if (human.empty()) {
    throw std::runtime_error("calibration requires a non-empty annotation set");
  }
  if (evaluator_scores.empty()) {
    throw std::runtime_error("calibration requires evaluator scores");
  }

  // Consensus per (question, answer, dimension).
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<int>>>
      by_item;  // (q,a) -> dimension -> annotator scores
  for (const auto& row : human.rows()) {
    by_item[{row.question_id, row.answer_id}][row.dimension].push_back(row.score);
  }
  // dimension -> item key -> consensus
  std::map<std::string, std::map<std::pair<std::string, std::string>, int>> consensus;
  for (const auto& [item, dims] : by_item) {
    for (const auto& [dim, scores] : dims) {
      consensus[dim][item] = consensus_label(scores);
    }
  }

  // Evaluator scores indexed the same way.
  std::map<std::string, std::map<std::string, std::map<std::pair<std::string, std::string>, int>>>
      machine;  // evaluator -> dimension -> item -> score
  for (const auto& row : evaluator_scores.rows()) {
    machine[row.annotator_id][row.dimension][{row.question_id, row.answer_id}] =
        row.score;
  }

  CalibrationResult result;
  std::map<std::string, EvaluatorProfile> profiles;
  for (const auto& [evaluator_id, dims] : machine) {
    (void)dims;
    profiles[evaluator_id].evaluator_id = evaluator_id;
  }

  for (const auto& [dim, items] : consensus) {
    std::vector<std::string> evaluator_ids;
    std::vector<double> kappas;
    for (const auto& [evaluator_id, eval_dims] : machine) {
      auto dim_it = eval_dims.find(dim);
      if (dim_it == eval_dims.end()) {
        throw std::runtime_error("evaluator '" + evaluator_id +
                                 "' has no scores for dimension '" + dim + "'");
      }
      std::vector<int> human_labels, eval_labels;
      for (const auto& [item, label] : items) {
        auto score_it = dim_it->second.find(item);
        if (score_it == dim_it->second.end()) {
          throw std::runtime_error("evaluator '" + evaluator_id +
                                   "' is missing item " + item.first + "/" +
                                   item.second + " for dimension '" + dim + "'");
        }
        human_labels.push_back(label);
        eval_labels.push_back(score_it->second);
      }
      KappaStat stat;
      stat.kappa = cohen_kappa(human_labels, eval_labels, options.weighting);
      stat.items = human_labels.size();
      if (human_labels.size() >= 2) {
        auto [lo, hi] =
            bootstrap_kappa_ci(human_labels, eval_labels, options.resamples,
                               options.level, options.seed, options.weighting);
        stat.ci_lo = lo;
        stat.ci_hi = hi;
      } else {
        stat.ci_lo = stat.ci_hi = stat.kappa;
      }
      profiles[evaluator_id].per_dimension[dim] = stat;
      evaluator_ids.push_back(evaluator_id);
      kappas.push_back(stat.kappa);
    }

    DimensionWeights dw;
    bool degenerate = false;
    auto weights = kappa_weights(kappas, &degenerate);
    dw.degenerate = degenerate;
    for (std::size_t i = 0; i < evaluator_ids.size(); ++i) {
      dw.by_evaluator[evaluator_ids[i]] = weights[i];
    }
    if (degenerate) {
      result.weights.warnings.push_back(
          "dimension '" + dim +
          "': no evaluator beat chance agreement; using uniform weights");
    }
    result.weights.by_dimension[dim] = std::move(dw);
  }

  for (auto& [id, profile] : profiles) {
    (void)id;
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Weights persistence

std::string HybridEvaluatorWeights::to_json_string(
    const std::vector<EvaluatorProfile>& profiles) const {
  json dims = json::object();
  for (const auto& [dim, dw] : by_dimension) {
    json evs = json::object();
    for (const auto& [evaluator_id, weight] : dw.by_evaluator) {
      json entry = {{"weight", weight}};
      for (const auto& profile : profiles) {
        if (profile.evaluator_id != evaluator_id) continue;
        auto it = profile.per_dimension.find(dim);
        if (it != profile.per_dimension.end()) {
          entry["kappa"] = it->second.kappa;
          entry["ci"] = json::array({it->second.ci_lo, it->second.ci_hi});
          entry["items"] = it->second.items;
        }
      }
      evs[evaluator_id] = std::move(entry);
    }
    dims[dim] = json{{"evaluators", std::move(evs)}, {"degenerate", dw.degenerate}};
  }
  json doc = {{"version", 1}, {"dimensions", dims}, {"warnings", warnings}};
  return doc.dump(2) + "\n";
}

void HybridEvaluatorWeights::save(const std::filesystem::path& file,
                                  const std::vector<EvaluatorProfile>& profiles) const {
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot write weights file: " + file.string());
  }
  out << to_json_string(profiles);
}

HybridEvaluatorWeights HybridEvaluatorWeights::load(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read weights file: " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("dimensions")) {
    throw std::runtime_error("weights file is not valid JSON: " + file.string());
  }
  HybridEvaluatorWeights weights;
  for (const auto& [dim, entry] : doc["dimensions"].items()) {
    DimensionWeights dw;
    dw.degenerate = entry.value("degenerate", false);
    const json evaluators = entry.value("evaluators", json::object());
    for (const auto& [evaluator_id, ev] : evaluators.items()) {
      dw.by_evaluator[evaluator_id] = ev.value("weight", 0.0);
    }
    weights.by_dimension[dim] = std::move(dw);
  }
  weights.warnings = doc.value("warnings", std::vector<std::string>{});
  return weights;
}

// ---------------------------------------------------------------------------
// Fusion

FusedScores fuse_scores(const EvaluatorScores& scores,
                        const HybridEvaluatorWeights& weights) {
  FusedScores fused;
  double total = 0.0;
  std::size_t fused_count = 0;
  for (const auto& [dim, dw] : weights.by_dimension) {
    double weight_sum = 0.0;
    double value = 0.0;
    std::vector<std::string> missing;
    for (const auto& [evaluator_id, weight] : dw.by_evaluator) {
      auto ev_it = scores.find(evaluator_id);
      if (ev_it == scores.end()) {
        if (weight > 0.0) missing.push_back(evaluator_id);
        continue;
      }
      auto score_it = ev_it->second.find(dim);
      if (score_it == ev_it->second.end()) {
        if (weight > 0.0) missing.push_back(evaluator_id);
        continue;
      }
      value += weight * score_it->second;
      weight_sum += weight;
    }
    if (weight_sum == 0.0) {
      fused.notes.push_back("dimension '" + dim +
                            "': no weighted evaluator produced a score");
      continue;
    }
    if (!missing.empty()) {
      std::string note = "dimension '" + dim + "': renormalized weights without";
      for (const auto& id : missing) note += " " + id;
      fused.notes.push_back(std::move(note));
    }
    value /= weight_sum;  // renormalize over the evaluators present
    fused.by_dimension[dim] = value;
    total += value;
    ++fused_count;
  }
  if (fused_count > 0) {
    fused.overall = total / static_cast<double>(fused_count);
  }
  return fused;
}

}  // namespace adaptqa::eval

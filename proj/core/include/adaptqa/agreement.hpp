#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptqa::eval {

/// The seven rubric dimensions, in rubric definition order.
inline constexpr std::array<std::string_view, 7> kRubricDimensions = {
    "context",     "structure",  "language", "comprehensiveness",
    "specificity", "citations",  "accuracy",
};

/// Report column order (Context, Structure, Language, Citations,
/// Specificity, Compreh., Accuracy).
inline constexpr std::array<std::string_view, 7> kReportDimensionOrder = {
    "context",     "structure",         "language", "citations",
    "specificity", "comprehensiveness", "accuracy",
};

bool is_rubric_dimension(std::string_view name);

enum class KappaWeighting { none, linear, quadratic };
std::optional<KappaWeighting> kappa_weighting_from_string(std::string_view s);

/// Cohen's kappa over the four categories {0,1,2,3}; unweighted by default,
/// with linear/quadratic disagreement weights as a sensitivity option.
/// Total single-category agreement (expected agreement 1) returns 1.0.
/// Throws std::invalid_argument on empty input, length mismatch, or labels
/// outside {0,1,2,3}.
double cohen_kappa(const std::vector<int>& labels_a,
                   const std::vector<int>& labels_b,
                   KappaWeighting weighting = KappaWeighting::none);

/// Percentile bootstrap over paired resampling; deterministic for a fixed
/// seed. Requires at least 2 pairs.
std::pair<double, double> bootstrap_kappa_ci(
    const std::vector<int>& labels_a, const std::vector<int>& labels_b,
    int resamples, double level, std::uint64_t seed,
    KappaWeighting weighting = KappaWeighting::none);

// ---------------------------------------------------------------------------
// Annotations

struct AnnotationRow {
  std::string question_id;
  std::string answer_id;
  std::string annotator_id;  // or evaluator id for machine scores
  std::string dimension;
  int score = 0;
};

/// Rows of (question_id, answer_id, annotator_id, dimension, score).
/// The same shape carries human annotations and evaluator scores.
class AnnotationSet {
 public:
  /// CSV with header question_id,answer_id,annotator_id,dimension,score.
  /// Throws std::runtime_error on unreadable files, malformed rows,
  /// out-of-range scores, or duplicate keys.
  static AnnotationSet load_csv(const std::filesystem::path& file);
  static AnnotationSet from_rows(std::vector<AnnotationRow> rows);

  const std::vector<AnnotationRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  std::vector<std::string> annotator_ids() const;
  std::vector<std::string> dimensions() const;

 private:
  std::vector<AnnotationRow> rows_;
};

/// Median of the annotators' scores, lower median on even counts.
int consensus_label(std::vector<int> scores);

struct KappaStat {
  double kappa = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t items = 0;
};

struct EvaluatorProfile {
  std::string evaluator_id;
  std::map<std::string, KappaStat> per_dimension;
};

struct DimensionWeights {
  std::map<std::string, double> by_evaluator;
  bool degenerate = false;  // all kappas <= 0 -> uniform weights
};

/// Per-(evaluator, dimension) reliability weights
///   w = max(kappa, 0) / sum_j max(kappa_j, 0),
/// uniform (with a warning) when every kappa in a dimension is <= 0.
struct HybridEvaluatorWeights {
  std::map<std::string, DimensionWeights> by_dimension;
  std::vector<std::string> warnings;

  std::string to_json_string(const std::vector<EvaluatorProfile>& profiles = {}) const;
  void save(const std::filesystem::path& file,
            const std::vector<EvaluatorProfile>& profiles = {}) const;
  static HybridEvaluatorWeights load(const std::filesystem::path& file);
};

/// Weight vector for one dimension from raw kappas (the normalization step
/// on its own, used by calibrate_weights and directly testable).
std::vector<double> kappa_weights(const std::vector<double>& kappas,
                                  bool* degenerate = nullptr);

struct CalibrationOptions {
  int resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 42;
  KappaWeighting weighting = KappaWeighting::none;
};

struct CalibrationResult {
  HybridEvaluatorWeights weights;
  std::vector<EvaluatorProfile> profiles;
};

/// Computes per-dimension agreement of each evaluator against the
/// per-item human consensus, then the reliability weights. Every evaluator
/// must have scored every annotated item of the calibrated dimensions;
/// throws std::runtime_error otherwise (or when the annotations are empty).
CalibrationResult calibrate_weights(const AnnotationSet& human,
                                    const AnnotationSet& evaluator_scores,
                                    const CalibrationOptions& options);

// ---------------------------------------------------------------------------
// Score fusion

/// evaluator id -> (dimension -> integer score 0..3); missing entries are
/// evaluator scoring failures.
using EvaluatorScores = std::map<std::string, std::map<std::string, int>>;

struct FusedScores {
  std::map<std::string, double> by_dimension;  // in [0,3]
  std::optional<double> overall;               // mean of the fused dimensions
  std::vector<std::string> notes;
};

/// Weighted sum per dimension. When an evaluator's score is missing for an
/// item the remaining weights renormalize for that item, with a note.
FusedScores fuse_scores(const EvaluatorScores& scores,
                        const HybridEvaluatorWeights& weights);

}  // namespace adaptqa::eval

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptqa/corpus.hpp"
#include "adaptqa/gateway.hpp"
#include "adaptqa/retrieval.hpp"

namespace adaptqa {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Operator-facing run configuration. JSON file keys mirror the nested
/// structure; unknown keys are rejected, ranges validated before any work.
/// API keys are named per provider via *_env entries and read from the
/// environment, never from the file.
struct RunConfig {
  struct Paths {
    std::string corpus;
    std::string gazetteer;
    std::string catalog;
    std::string climate_fixtures;  // directory of per-action fixture files
    std::string scripted_fixture;  // gateway fixture for scripted backends
    std::string index = "index.json";
    std::string weights;
    std::string trace = "trace.json";
    std::string exemplars;  // optional few-shot bundle
  } paths;

  retrieval::HybridConfig retrieval;
  corpus::ChunkPolicy chunking;

  struct Loop {
    int max_iterations = 3;
    int max_subq = 2;
    bool climate = true;
  } loop;

  struct Eval {
    double alpha = 0.5;
    double theta = 0.6;
    int bootstrap_resamples = 2000;
    double bootstrap_level = 0.95;
    std::uint64_t seed = 42;
    std::string mode = "zero-shot";
    std::string kappa_weighting = "none";
    std::vector<std::string> evaluators = {"offline-evaluator"};
    // Alternate fusion reading: fold the faithfulness score (rescaled to
    // 0-3) into the overall average instead of reporting it alongside.
    bool avg_includes_faithfulness = false;
  } eval;

  struct Backends {
    std::string default_kind = "scripted";            // scripted | http
    std::map<std::string, std::string> overrides;     // purpose -> kind
    std::map<std::string, std::string> models;        // purpose -> model id
    std::map<std::string, llm::HttpProviderConfig> http;  // purpose|default
    bool scripted_strict = false;
    int retries = 2;
    int backoff_ms = 200;
    std::string climate_base_url;
    std::string climate_api_key_env = "ADAPTQA_CLIMATE_API_KEY";
  } backends;

  /// Throws ConfigError on unreadable files, unknown keys, or bad ranges.
  static RunConfig load(const std::filesystem::path& file);
  static RunConfig parse_json_text(const std::string& json_text);

  void validate() const;

  std::string model_for(const std::string& purpose) const;
};

/// Wire a gateway from the configured backends: scripted fixtures and the
/// deterministic hash embedder offline, HTTP providers online.
std::shared_ptr<llm::Gateway> make_gateway(const RunConfig& config);

}  // namespace adaptqa

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptqa/gateway.hpp"
#include "adaptqa/geo.hpp"

namespace adaptqa::climate {

enum class ParamType { location, text, choice, number };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::text;
  bool required = true;
  std::vector<std::string> allowed;  // for choice
  std::optional<double> min_value;   // for number
  std::optional<double> max_value;
};

struct ApiAction {
  std::string action_id;
  std::string description;
  std::vector<ParamSpec> parameters;

  const ParamSpec* find_param(std::string_view name) const;
};

/// Data-file catalog of climate-data endpoints; new endpoints need no
/// rebuild.
class ActionCatalog {
 public:
  /// JSON: {"actions": [{"action_id", "description",
  ///   "parameters": [{"name", "type", "required", "allowed", "min", "max"}]}]}
  static ActionCatalog load(const std::filesystem::path& file);
  static ActionCatalog from_actions(std::vector<ApiAction> actions);

  const ApiAction* find(std::string_view action_id) const;
  const std::vector<ApiAction>& actions() const { return actions_; }
  bool empty() const { return actions_.empty(); }

 private:
  std::vector<ApiAction> actions_;
};

struct ApiParameterSet {
  std::string action_id;
  std::map<std::string, std::string> values;
};

/// Sorted name=value pairs joined with '&'; the fixture lookup key.
std::string canonical_param_key(const ApiParameterSet& params);

struct ClimateRecord {
  std::string location;
  std::string variable;   // precipitation, temperature, crop-yield indicator...
  std::string statistic;  // mean_annual, maximum, ...
  double value = 0.0;
  std::string unit;
  std::optional<std::string> period;
  std::string provenance;  // source identifier + query echo
};

struct DataSnippet {
  std::string snippet_id;
  std::string text;  // one sentence carrying value, unit and location verbatim
  ClimateRecord record;
};

class ClimateClientError : public std::runtime_error {
 public:
  explicit ClimateClientError(const std::string& what)
      : std::runtime_error(what) {}
};

class ClimateClient {
 public:
  virtual ~ClimateClient() = default;
  /// Throws ClimateClientError on transport failure; an unknown key is an
  /// empty result, not an error.
  virtual std::vector<ClimateRecord> fetch(const ApiParameterSet& params) = 0;
};

/// Resolves from one JSON file per action under `dir`:
///   {"records": {"<canonical key>": [{location, variable, statistic, value,
///                                     unit, period}]}}
class FixtureClimateClient : public ClimateClient {
 public:
  explicit FixtureClimateClient(std::filesystem::path dir);
  std::vector<ClimateRecord> fetch(const ApiParameterSet& params) override;

 private:
  std::filesystem::path dir_;
};

/// Live client: GET-style lookup over an HTTP JSON API; base URL from config,
/// key from the named environment variable.
class HttpClimateClient : public ClimateClient {
 public:
  HttpClimateClient(std::string base_url, std::string api_key_env,
                    std::shared_ptr<llm::HttpTransport> transport = nullptr);
  std::vector<ClimateRecord> fetch(const ApiParameterSet& params) override;

 private:
  std::string base_url_;
  std::string api_key_env_;
  std::shared_ptr<llm::HttpTransport> transport_;
};

/// Stage 1 of action–parameter reasoning: constrained choice over the
/// catalog. Returns nullopt when no climate data is needed, or after a
/// failed retry (with a note). Throws std::invalid_argument on an empty
/// catalog.
std::optional<ApiAction> select_action(std::string_view question,
                                       const ActionCatalog& catalog,
                                       llm::Gateway& gateway,
                                       const std::string& model,
                                       std::vector<std::string>* notes = nullptr);

/// Stage 2: schema fill, validated field by field. Location values are
/// normalized through the gazetteer (unrecognized places pass through
/// verbatim); unknown fields are dropped. One repair retry with the
/// validation errors echoed; nullopt after the second failure.
std::optional<ApiParameterSet> generate_parameters(
    std::string_view question, const ApiAction& action,
    const geo::Gazetteer& gazetteer, llm::Gateway& gateway,
    const std::string& model, std::vector<std::string>* notes = nullptr);

/// Validation used by stage 2 and by tests: empty result means valid.
std::vector<std::string> validate_parameters(const ApiAction& action,
                                             const ApiParameterSet& params);

/// Fetch with a bounded retry budget; after the budget is exhausted the
/// failure is noted and an empty list returned so the pipeline proceeds
/// literature-only.
std::vector<ClimateRecord> fetch_climate_data(const ApiParameterSet& params,
                                              ClimateClient& client,
                                              int retries = 2,
                                              std::vector<std::string>* notes = nullptr);

/// Deterministic template fill:
///   "the {statistic phrase} {variable} in {location} is {value} {unit}"
/// plus " ({period})" when a period is present. A statistic missing from the
/// phrase table falls back to the raw statistic string, with a note.
DataSnippet verbalise(const ClimateRecord& record,
                      std::vector<std::string>* notes = nullptr);

/// select -> fill -> fetch -> verbalise, degrading to an empty snippet list
/// (never an exception) so answers fall back to literature only.
class ClimatePipeline {
 public:
  ClimatePipeline(const ActionCatalog* catalog, ClimateClient* client,
                  const geo::Gazetteer* gazetteer, llm::Gateway* gateway,
                  std::string select_model = "", std::string fill_model = "");

  std::vector<DataSnippet> run(std::string_view question,
                               std::vector<std::string>& notes) const;

 private:
  const ActionCatalog* catalog_;
  ClimateClient* client_;
  const geo::Gazetteer* gazetteer_;
  llm::Gateway* gateway_;
  std::string select_model_;
  std::string fill_model_;
};

}  // namespace adaptqa::climate

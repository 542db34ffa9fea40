#include "adaptqa/climate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "adaptqa/text.hpp"

namespace adaptqa::climate {

using nlohmann::json;

namespace {

std::string param_type_name(ParamType t) {
  switch (t) {
    case ParamType::location: return "location";
    case ParamType::text: return "text";
    case ParamType::choice: return "choice";
    case ParamType::number: return "number";
  }
  return "text";
}

ParamType param_type_from(std::string_view s) {
  if (s == "location") return ParamType::location;
  if (s == "choice") return ParamType::choice;
  if (s == "number") return ParamType::number;
  return ParamType::text;
}

/// Key-value lines "name: value" -> map; anything else is ignored.
std::map<std::string, std::string> parse_kv(std::string_view response) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = text::casefold(text::trim(line.substr(0, colon)));
    std::string value = text::trim(line.substr(colon + 1));
    if (key.empty() || value.empty()) continue;
    out.emplace(std::move(key), std::move(value));
  }
  return out;
}

ClimateRecord record_from_json(const json& r) {
  ClimateRecord rec;
  rec.location = r.value("location", "");
  rec.variable = r.value("variable", "");
  rec.statistic = r.value("statistic", "");
  rec.value = r.value("value", 0.0);
  rec.unit = r.value("unit", "");
  if (r.contains("period") && r["period"].is_string()) {
    rec.period = r["period"].get<std::string>();
  }
  return rec;
}

}  // namespace

const ParamSpec* ApiAction::find_param(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

ActionCatalog ActionCatalog::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read action catalog: " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error("action catalog is not valid JSON: " + file.string());
  }
  std::vector<ApiAction> actions;
  for (const auto& a : doc.value("actions", json::array())) {
    ApiAction action;
    action.action_id = a.value("action_id", "");
    action.description = a.value("description", "");
    if (action.action_id.empty()) {
      throw std::runtime_error("action catalog entry missing action_id");
    }
    for (const auto& p : a.value("parameters", json::array())) {
      ParamSpec spec;
      spec.name = p.value("name", "");
      if (spec.name.empty()) {
        throw std::runtime_error("parameter schema entry missing name in action " +
                                 action.action_id);
      }
      if (action.find_param(spec.name)) {
        throw std::runtime_error("duplicate parameter name '" + spec.name +
                                 "' in action " + action.action_id);
      }
      spec.type = param_type_from(p.value("type", "text"));
      spec.required = p.value("required", true);
      spec.allowed = p.value("allowed", std::vector<std::string>{});
      if (p.contains("min")) spec.min_value = p["min"].get<double>();
      if (p.contains("max")) spec.max_value = p["max"].get<double>();
      action.parameters.push_back(std::move(spec));
    }
    actions.push_back(std::move(action));
  }
  return from_actions(std::move(actions));
}

ActionCatalog ActionCatalog::from_actions(std::vector<ApiAction> actions) {
  ActionCatalog catalog;
  for (auto& action : actions) {
    if (catalog.find(action.action_id)) {
      throw std::runtime_error("duplicate action_id: " + action.action_id);
    }
    catalog.actions_.push_back(std::move(action));
  }
  return catalog;
}

const ApiAction* ActionCatalog::find(std::string_view action_id) const {
  for (const auto& a : actions_) {
    if (a.action_id == action_id) return &a;
  }
  return nullptr;
}

std::string canonical_param_key(const ApiParameterSet& params) {
  std::string key;
  for (const auto& [name, value] : params.values) {  // std::map: sorted
    if (!key.empty()) key.push_back('&');
    key += name + "=" + value;
  }
  return key;
}

// ---------------------------------------------------------------------------
// Clients

FixtureClimateClient::FixtureClimateClient(std::filesystem::path dir)
    : dir_(std::move(dir)) {}

std::vector<ClimateRecord> FixtureClimateClient::fetch(
    const ApiParameterSet& params) {
  auto file = dir_ / (params.action_id + ".json");
  std::ifstream in(file);
  if (!in) return {};  // no fixture for this action -> miss
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ClimateClientError("climate fixture is not valid JSON: " + file.string());
  }
  const std::string key = canonical_param_key(params);
  const auto& records = doc.value("records", json::object());
  if (!records.contains(key)) return {};
  std::vector<ClimateRecord> out;
  for (const auto& r : records[key]) {
    ClimateRecord rec = record_from_json(r);
    rec.provenance = "fixture:" + params.action_id + "?" + key;
    out.push_back(std::move(rec));
  }
  return out;
}

HttpClimateClient::HttpClimateClient(std::string base_url, std::string api_key_env,
                                     std::shared_ptr<llm::HttpTransport> transport)
    : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)),
      transport_(transport ? std::move(transport) : llm::make_default_transport()) {}

std::vector<ClimateRecord> HttpClimateClient::fetch(const ApiParameterSet& params) {
  const char* key_value =
      api_key_env_.empty() ? nullptr : std::getenv(api_key_env_.c_str());
  json body = {{"action", params.action_id}, {"parameters", params.values}};
  llm::HttpResponse res;
  try {
    res = transport_->post(base_url_, "/v1/query", body.dump(),
                           key_value ? key_value : "");
  } catch (const llm::GatewayError& err) {
    throw ClimateClientError(err.what());
  }
  if (res.status != 200) {
    throw ClimateClientError("climate API returned status " +
                             std::to_string(res.status));
  }
  json doc = json::parse(res.body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("records")) {
    throw ClimateClientError("climate API response missing records");
  }
  std::vector<ClimateRecord> out;
  for (const auto& r : doc["records"]) {
    ClimateRecord rec = record_from_json(r);
    rec.provenance =
        base_url_ + ":" + params.action_id + "?" + canonical_param_key(params);
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-stage action–parameter reasoning

namespace {

std::string action_select_prompt(std::string_view question,
                                 const ActionCatalog& catalog,
                                 const std::string& error_echo) {
  std::string prompt =
      "Choose the climate-data lookup that would help answer the question, "
      "or 'none' when no climate data is needed.\n"
      "Respond with exactly one line of the form:\naction: <action_id>\n\n"
      "Available actions:\n";
  for (const auto& a : catalog.actions()) {
    prompt += "- " + a.action_id + ": " + a.description + "\n";
  }
  prompt += "- none: no climate data needed\n";
  if (!error_echo.empty()) {
    prompt += "\nYour previous reply was invalid: " + error_echo + "\n";
  }
  prompt += "\nQuestion: " + std::string(question) + "\naction:";
  return prompt;
}

std::string param_fill_prompt(std::string_view question, const ApiAction& action,
                              const std::vector<std::string>& errors) {
  std::string prompt = "Fill the parameters for the climate-data action '" +
                       action.action_id + "' (" + action.description + ").\n" +
                       "Respond with one 'name: value' line per parameter.\n\n" +
                       "Parameters:\n";
  for (const auto& p : action.parameters) {
    prompt += "- " + p.name + " (" + param_type_name(p.type) +
              (p.required ? ", required" : ", optional") + ")";
    if (!p.allowed.empty()) {
      prompt += " one of:";
      for (const auto& v : p.allowed) prompt += " " + v;
    }
    if (p.min_value || p.max_value) {
      prompt += " range";
      if (p.min_value) prompt += fmt::format(" min {}", *p.min_value);
      if (p.max_value) prompt += fmt::format(" max {}", *p.max_value);
    }
    prompt += "\n";
  }
  if (!errors.empty()) {
    prompt += "\nYour previous reply failed validation:\n";
    for (const auto& e : errors) prompt += "- " + e + "\n";
  }
  prompt += "\nQuestion: " + std::string(question) + "\n";
  return prompt;
}

void add_note(std::vector<std::string>* notes, std::string note) {
  if (notes) notes->push_back(std::move(note));
}

}  // namespace

std::optional<ApiAction> select_action(std::string_view question,
                                       const ActionCatalog& catalog,
                                       llm::Gateway& gateway,
                                       const std::string& model,
                                       std::vector<std::string>* notes) {
  if (catalog.empty()) {
    throw std::invalid_argument("action catalog is empty");
  }
  std::string error_echo;
  for (int attempt = 0; attempt < 2; ++attempt) {
    llm::ModelRequest request;
    request.purpose = llm::Purpose::action_select;
    request.model = model;
    request.shape_hint = "key-value: action";
    request.prompt = action_select_prompt(question, catalog, error_echo);
    std::string response = gateway.complete(request);
    auto kv = parse_kv(response);
    std::string id;
    if (auto it = kv.find("action"); it != kv.end()) {
      id = it->second;
    } else {
      // Accept a bare action id as the whole reply.
      id = text::trim(response);
    }
    if (text::casefold(id) == "none") return std::nullopt;
    if (const ApiAction* action = catalog.find(id)) return *action;
    error_echo = "'" + id + "' is not in the action list";
  }
  add_note(notes, "warning: action selection returned an unknown action twice; "
                  "proceeding without climate data");
  return std::nullopt;
}

std::vector<std::string> validate_parameters(const ApiAction& action,
                                             const ApiParameterSet& params) {
  std::vector<std::string> errors;
  for (const auto& spec : action.parameters) {
    auto it = params.values.find(spec.name);
    if (it == params.values.end()) {
      if (spec.required) {
        errors.push_back("missing required parameter '" + spec.name + "'");
      }
      continue;
    }
    const std::string& value = it->second;
    switch (spec.type) {
      case ParamType::choice: {
        if (std::find(spec.allowed.begin(), spec.allowed.end(), value) ==
            spec.allowed.end()) {
          errors.push_back("parameter '" + spec.name + "' value '" + value +
                           "' is not an allowed choice");
        }
        break;
      }
      case ParamType::number: {
        char* end = nullptr;
        double num = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0') {
          errors.push_back("parameter '" + spec.name + "' is not a number");
          break;
        }
        if ((spec.min_value && num < *spec.min_value) ||
            (spec.max_value && num > *spec.max_value)) {
          errors.push_back("parameter '" + spec.name + "' is out of range");
        }
        break;
      }
      case ParamType::location:
      case ParamType::text:
        break;  // any non-empty string
    }
  }
  for (const auto& [name, value] : params.values) {
    (void)value;
    if (!action.find_param(name)) {
      errors.push_back("unknown parameter '" + name + "'");
    }
  }
  return errors;
}

std::optional<ApiParameterSet> generate_parameters(
    std::string_view question, const ApiAction& action,
    const geo::Gazetteer& gazetteer, llm::Gateway& gateway,
    const std::string& model, std::vector<std::string>* notes) {
  std::vector<std::string> errors;
  for (int attempt = 0; attempt < 2; ++attempt) {
    llm::ModelRequest request;
    request.purpose = llm::Purpose::param_fill;
    request.model = model;
    request.shape_hint = "key-value parameters";
    request.prompt = param_fill_prompt(question, action, errors);
    std::string response = gateway.complete(request);

    ApiParameterSet params;
    params.action_id = action.action_id;
    for (auto& [name, value] : parse_kv(response)) {
      const ParamSpec* spec = action.find_param(name);
      if (!spec) continue;  // unknown fields are dropped
      std::string final_value = value;
      if (spec->type == ParamType::location) {
        if (auto tag = gazetteer.lookup(value)) {
          final_value = tag->place_name();
        }
      }
      params.values[name] = std::move(final_value);
    }
    errors = validate_parameters(action, params);
    if (errors.empty()) return params;
  }
  std::string summary = "parameter generation failed for action '" +
                        action.action_id + "':";
  for (const auto& e : errors) summary += " " + e + ";";
  add_note(notes, summary);
  return std::nullopt;
}

std::vector<ClimateRecord> fetch_climate_data(const ApiParameterSet& params,
                                              ClimateClient& client, int retries,
                                              std::vector<std::string>* notes) {
  std::string last_error;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    try {
      return client.fetch(params);
    } catch (const ClimateClientError& err) {
      last_error = err.what();
    }
  }
  add_note(notes, "climate data fetch failed after " +
                      std::to_string(retries + 1) + " attempts (" + last_error +
                      "); proceeding literature-only");
  return {};
}

DataSnippet verbalise(const ClimateRecord& record,
                      std::vector<std::string>* notes) {
  static const std::map<std::string, std::string, std::less<>> phrases = {
      {"mean_annual", "average"},
      {"mean_monthly", "average monthly"},
      {"mean", "average"},
      {"maximum", "maximum"},
      {"minimum", "minimum"},
      {"total_annual", "total annual"},
      {"trend", "trend of"},
  };
  std::string phrase;
  if (auto it = phrases.find(record.statistic); it != phrases.end()) {
    phrase = it->second;
  } else {
    phrase = record.statistic;
    add_note(notes, "no phrase for statistic '" + record.statistic +
                        "'; using it verbatim");
  }
  DataSnippet snippet;
  snippet.record = record;
  snippet.text = fmt::format("the {} {} in {} is {} {}", phrase, record.variable,
                             record.location, record.value, record.unit);
  if (record.period) {
    snippet.text += " (" + *record.period + ")";
  }
  snippet.snippet_id =
      "data:" + record.provenance + "#" + text::digest_hex(snippet.text);
  return snippet;
}

ClimatePipeline::ClimatePipeline(const ActionCatalog* catalog,
                                 ClimateClient* client,
                                 const geo::Gazetteer* gazetteer,
                                 llm::Gateway* gateway, std::string select_model,
                                 std::string fill_model)
    : catalog_(catalog), client_(client), gazetteer_(gazetteer),
      gateway_(gateway), select_model_(std::move(select_model)),
      fill_model_(std::move(fill_model)) {}

std::vector<DataSnippet> ClimatePipeline::run(
    std::string_view question, std::vector<std::string>& notes) const {
  if (!catalog_ || !client_ || !gazetteer_ || !gateway_ || catalog_->empty()) {
    return {};
  }
  std::optional<ApiAction> action;
  try {
    action = select_action(question, *catalog_, *gateway_, select_model_, &notes);
  } catch (const llm::GatewayError& err) {
    notes.push_back(std::string("climate action selection failed: ") + err.what());
    return {};
  }
  if (!action) return {};

  std::optional<ApiParameterSet> params;
  try {
    params = generate_parameters(question, *action, *gazetteer_, *gateway_,
                                 fill_model_, &notes);
  } catch (const llm::GatewayError& err) {
    notes.push_back(std::string("climate parameter generation failed: ") +
                    err.what());
    return {};
  }
  if (!params) return {};

  auto records = fetch_climate_data(*params, *client_, 2, &notes);
  std::vector<DataSnippet> snippets;
  snippets.reserve(records.size());
  for (const auto& rec : records) {
    snippets.push_back(verbalise(rec, &notes));
  }
  return snippets;
}

}  // namespace adaptqa::climate

#include "adaptqa/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "adaptqa/agreement.hpp"
#include "adaptqa/evaluation.hpp"

namespace adaptqa {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + scope + key + "'");
    }
  }
}

llm::HttpProviderConfig parse_provider(const json& obj, const std::string& scope) {
  reject_unknown_keys(obj, {"base_url", "model", "api_key_env"}, scope);
  llm::HttpProviderConfig provider;
  provider.base_url = obj.value("base_url", "");
  provider.model = obj.value("model", "");
  provider.api_key_env = obj.value("api_key_env", "");
  return provider;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot read config file: " + file.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return parse_json_text(content);
}

RunConfig RunConfig::parse_json_text(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config is not a JSON object");
  }
  RunConfig config;
  reject_unknown_keys(doc,
                      {"paths", "retrieval", "chunking", "loop", "eval",
                       "backends"},
                      "");

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    reject_unknown_keys(p,
                        {"corpus", "gazetteer", "catalog", "climate_fixtures",
                         "scripted_fixture", "index", "weights", "trace",
                         "exemplars"},
                        "paths.");
    config.paths.corpus = p.value("corpus", config.paths.corpus);
    config.paths.gazetteer = p.value("gazetteer", config.paths.gazetteer);
    config.paths.catalog = p.value("catalog", config.paths.catalog);
    config.paths.climate_fixtures =
        p.value("climate_fixtures", config.paths.climate_fixtures);
    config.paths.scripted_fixture =
        p.value("scripted_fixture", config.paths.scripted_fixture);
    config.paths.index = p.value("index", config.paths.index);
    config.paths.weights = p.value("weights", config.paths.weights);
    config.paths.trace = p.value("trace", config.paths.trace);
    config.paths.exemplars = p.value("exemplars", config.paths.exemplars);
  }

  if (doc.contains("retrieval")) {
    const auto& r = doc["retrieval"];
    reject_unknown_keys(
        r, {"lambda", "beta", "k", "k1", "b", "neutral_loc_sim", "pool_size"},
        "retrieval.");
    config.retrieval.lambda = r.value("lambda", config.retrieval.lambda);
    config.retrieval.beta = r.value("beta", config.retrieval.beta);
    config.retrieval.k = r.value("k", config.retrieval.k);
    config.retrieval.bm25.k1 = r.value("k1", config.retrieval.bm25.k1);
    config.retrieval.bm25.b = r.value("b", config.retrieval.bm25.b);
    config.retrieval.neutral_loc_sim =
        r.value("neutral_loc_sim", config.retrieval.neutral_loc_sim);
    config.retrieval.pool_size = r.value("pool_size", config.retrieval.pool_size);
  }

  if (doc.contains("chunking")) {
    const auto& c = doc["chunking"];
    reject_unknown_keys(c, {"size_words", "overlap_words"}, "chunking.");
    config.chunking.size_words = c.value("size_words", config.chunking.size_words);
    config.chunking.overlap_words =
        c.value("overlap_words", config.chunking.overlap_words);
  }

  if (doc.contains("loop")) {
    const auto& l = doc["loop"];
    reject_unknown_keys(l, {"max_iterations", "max_subq", "climate"}, "loop.");
    config.loop.max_iterations = l.value("max_iterations", config.loop.max_iterations);
    config.loop.max_subq = l.value("max_subq", config.loop.max_subq);
    config.loop.climate = l.value("climate", config.loop.climate);
  }

  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    reject_unknown_keys(e,
                        {"alpha", "theta", "bootstrap_resamples",
                         "bootstrap_level", "seed", "mode", "kappa_weighting",
                         "evaluators", "avg_includes_faithfulness"},
                        "eval.");
    config.eval.alpha = e.value("alpha", config.eval.alpha);
    config.eval.theta = e.value("theta", config.eval.theta);
    config.eval.bootstrap_resamples =
        e.value("bootstrap_resamples", config.eval.bootstrap_resamples);
    config.eval.bootstrap_level =
        e.value("bootstrap_level", config.eval.bootstrap_level);
    config.eval.seed = e.value("seed", config.eval.seed);
    config.eval.mode = e.value("mode", config.eval.mode);
    config.eval.kappa_weighting =
        e.value("kappa_weighting", config.eval.kappa_weighting);
    config.eval.evaluators = e.value("evaluators", config.eval.evaluators);
    config.eval.avg_includes_faithfulness = e.value(
        "avg_includes_faithfulness", config.eval.avg_includes_faithfulness);
  }

  if (doc.contains("backends")) {
    const auto& b = doc["backends"];
    reject_unknown_keys(b,
                        {"default", "overrides", "models", "http",
                         "scripted_strict", "retries", "backoff_ms",
                         "climate_base_url", "climate_api_key_env"},
                        "backends.");
    config.backends.default_kind = b.value("default", config.backends.default_kind);
    if (b.contains("overrides")) {
      config.backends.overrides =
          b["overrides"].get<std::map<std::string, std::string>>();
    }
    if (b.contains("models")) {
      config.backends.models = b["models"].get<std::map<std::string, std::string>>();
    }
    if (b.contains("http")) {
      for (const auto& [purpose, provider] : b["http"].items()) {
        config.backends.http[purpose] =
            parse_provider(provider, "backends.http." + purpose + ".");
      }
    }
    config.backends.scripted_strict =
        b.value("scripted_strict", config.backends.scripted_strict);
    config.backends.retries = b.value("retries", config.backends.retries);
    config.backends.backoff_ms = b.value("backoff_ms", config.backends.backoff_ms);
    config.backends.climate_base_url =
        b.value("climate_base_url", config.backends.climate_base_url);
    config.backends.climate_api_key_env =
        b.value("climate_api_key_env", config.backends.climate_api_key_env);
  }

  config.validate();
  return config;
}

void RunConfig::validate() const {
  try {
    retrieval.validate();  // lambda, beta, k, bm25, pool
    chunking.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  if (loop.max_iterations < 1) {
    throw ConfigError("loop.max_iterations must be >= 1");
  }
  if (loop.max_subq < 0) {
    throw ConfigError("loop.max_subq must be >= 0");
  }
  if (eval.alpha < 0.0 || eval.alpha > 1.0) {
    throw ConfigError("eval.alpha must be in [0,1]");
  }
  if (eval.theta < 0.0 || eval.theta > 1.0) {
    throw ConfigError("eval.theta must be in [0,1]");
  }
  if (eval.bootstrap_resamples < 1) {
    throw ConfigError("eval.bootstrap_resamples must be >= 1");
  }
  if (eval.bootstrap_level <= 0.0 || eval.bootstrap_level >= 1.0) {
    throw ConfigError("eval.bootstrap_level must be in (0,1)");
  }
  if (!eval::scoring_mode_from_string(eval.mode)) {
    throw ConfigError("eval.mode must be zero-shot or few-shot");
  }
  if (!eval::kappa_weighting_from_string(eval.kappa_weighting)) {
    throw ConfigError("eval.kappa_weighting must be none, linear or quadratic");
  }
  if (eval.evaluators.empty()) {
    throw ConfigError("eval.evaluators must name at least one evaluator");
  }
  if (backends.default_kind != "scripted" && backends.default_kind != "http") {
    throw ConfigError("backends.default must be 'scripted' or 'http'");
  }
  for (const auto& [purpose, kind] : backends.overrides) {
    if (!llm::purpose_from_string(purpose)) {
      throw ConfigError("backends.overrides: unknown purpose '" + purpose + "'");
    }
    if (kind != "scripted" && kind != "http") {
      throw ConfigError("backends.overrides." + purpose +
                        " must be 'scripted' or 'http'");
    }
  }
  for (const auto& [purpose, model] : backends.models) {
    (void)model;
    if (!llm::purpose_from_string(purpose)) {
      throw ConfigError("backends.models: unknown purpose '" + purpose + "'");
    }
  }
  if (backends.retries < 0) {
    throw ConfigError("backends.retries must be >= 0");
  }
  if (backends.backoff_ms < 0) {
    throw ConfigError("backends.backoff_ms must be >= 0");
  }
}

std::string RunConfig::model_for(const std::string& purpose) const {
  if (auto it = backends.models.find(purpose); it != backends.models.end()) {
    return it->second;
  }
  return "offline";
}

std::shared_ptr<llm::Gateway> make_gateway(const RunConfig& config) {
  auto gateway = std::make_shared<llm::Gateway>();
  gateway->set_retries(config.backends.retries);
  gateway->set_backoff_ms(config.backends.backoff_ms);

  std::shared_ptr<llm::CompletionBackend> scripted;
  auto get_scripted = [&]() -> std::shared_ptr<llm::CompletionBackend> {
    if (!scripted) {
      if (config.paths.scripted_fixture.empty()) {
        scripted = std::make_shared<llm::ScriptedBackend>(
            std::vector<llm::ScriptedEntry>{}, "",
            config.backends.scripted_strict);
      } else {
        scripted = llm::ScriptedBackend::load(config.paths.scripted_fixture);
      }
    }
    return scripted;
  };
  auto http_for = [&](const std::string& purpose)
      -> std::shared_ptr<llm::CompletionBackend> {
    auto it = config.backends.http.find(purpose);
    if (it == config.backends.http.end()) {
      it = config.backends.http.find("default");
    }
    if (it == config.backends.http.end()) {
      throw ConfigError("backends.http missing a provider for purpose '" +
                        purpose + "' (and no default)");
    }
    return std::make_shared<llm::HttpBackend>(it->second);
  };

  if (config.backends.default_kind == "scripted") {
    gateway->set_default_backend(get_scripted());
  } else {
    gateway->set_default_backend(http_for("default"));
  }
  for (const auto& [purpose, kind] : config.backends.overrides) {
    auto tag = llm::purpose_from_string(purpose);
    if (!tag || *tag == llm::Purpose::embed) continue;  // embed handled below
    gateway->set_backend(*tag, kind == "scripted" ? get_scripted()
                                                  : http_for(purpose));
  }

  // Embeddings: deterministic hash embedder unless an HTTP embedder is
  // explicitly selected.
  auto embed_kind = config.backends.overrides.count("embed")
                        ? config.backends.overrides.at("embed")
                        : (config.backends.default_kind == "http" &&
                                   config.backends.http.count("embed")
                               ? "http"
                               : "scripted");
  if (embed_kind == "http") {
    auto it = config.backends.http.find("embed");
    if (it == config.backends.http.end()) {
      throw ConfigError("backends.http.embed required for an http embedder");
    }
    gateway->set_embedding_backend(std::make_shared<llm::HttpBackend>(it->second));
  } else {
    gateway->set_embedding_backend(std::make_shared<llm::HashEmbedder>(64));
  }
  return gateway;
}

}  // namespace adaptqa

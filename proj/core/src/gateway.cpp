#include "adaptqa/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "adaptqa/text.hpp"

#include <httplib.h>

namespace adaptqa::llm {

using nlohmann::json;

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::generation: return "generation";
    case Purpose::sufficiency: return "sufficiency";
    case Purpose::action_select: return "action-select";
    case Purpose::param_fill: return "param-fill";
    case Purpose::rubric: return "rubric";
    case Purpose::faithfulness: return "faithfulness";
    case Purpose::claims: return "claims";
    case Purpose::embed: return "embed";
  }
  return "unknown";
}

std::optional<Purpose> purpose_from_string(std::string_view s) {
  static const std::map<std::string, Purpose, std::less<>> table = {
      {"generation", Purpose::generation},
      {"sufficiency", Purpose::sufficiency},
      {"action-select", Purpose::action_select},
      {"param-fill", Purpose::param_fill},
      {"rubric", Purpose::rubric},
      {"faithfulness", Purpose::faithfulness},
      {"claims", Purpose::claims},
      {"embed", Purpose::embed},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::vector<ScriptedEntry> entries,
                                 std::string fallback, bool strict)
    : entries_(std::move(entries)), fallback_(std::move(fallback)),
      strict_(strict) {}

std::shared_ptr<ScriptedBackend> ScriptedBackend::load(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot read scripted fixture: " + file.string());
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::runtime_error("scripted fixture is not valid JSON: " +
                             file.string());
  }
  std::vector<ScriptedEntry> entries;
  for (const auto& e : doc.value("entries", json::array())) {
    ScriptedEntry entry;
    if (e.contains("purpose")) {
      auto p = purpose_from_string(e["purpose"].get<std::string>());
      if (!p) {
        throw std::runtime_error("scripted fixture: unknown purpose tag '" +
                                 e["purpose"].get<std::string>() + "'");
      }
      entry.purpose = *p;
    }
    entry.match = e.value("match", "");
    entry.model = e.value("model", "");
    entry.response = e.value("response", "");
    entry.max_uses = e.value("max_uses", -1);
    entries.push_back(std::move(entry));
  }
  return std::make_shared<ScriptedBackend>(std::move(entries),
                                           doc.value("fallback", ""),
                                           doc.value("strict", false));
}

std::string ScriptedBackend::complete(const ModelRequest& request) {
  std::lock_guard<std::mutex> lock(mutex_);
  for (auto& entry : entries_) {
    if (entry.purpose && *entry.purpose != request.purpose) continue;
    if (!entry.match.empty() &&
        request.prompt.find(entry.match) == std::string::npos) {
      continue;
    }
    if (!entry.model.empty() &&
        request.model.find(entry.model) == std::string::npos) {
      continue;
    }
    if (entry.max_uses >= 0 && entry.uses >= entry.max_uses) continue;
    ++entry.uses;
    return entry.response;
  }
  if (strict_) {
    throw GatewayError("scripted fixture exhausted for purpose '" +
                           std::string(to_string(request.purpose)) + "'",
                       /*retryable=*/false);
  }
  return fallback_;
}

// ---------------------------------------------------------------------------
// HashEmbedder

HashEmbedder::HashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("embedder dimension must be positive");
}

std::vector<std::vector<double>> HashEmbedder::embed(
    const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<double> v(dimension_, 0.0);
    auto tokens = text::tokenize(t);
    if (tokens.empty()) {
      v[0] = 1.0;  // empty input embeds to e_1
      out.push_back(std::move(v));
      continue;
    }
    for (const auto& tok : tokens) {
      v[text::fnv1a64(tok) % dimension_] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

std::string HashEmbedder::id() const {
  return "hash-" + std::to_string(dimension_);
}

// ---------------------------------------------------------------------------
// HttpBackend

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string& base_url, const std::string& path,
                    const std::string& body, const std::string& api_key) override {
    httplib::Client client(base_url);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      throw GatewayError("http transport failure contacting " + base_url,
                         /*retryable=*/true);
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_default_transport() {
  return std::make_shared<HttplibTransport>();
}

HttpBackend::HttpBackend(HttpProviderConfig config,
                         std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_default_transport()) {}

std::string HttpBackend::api_key() const {
  if (config_.api_key_env.empty()) return "";
  const char* value = std::getenv(config_.api_key_env.c_str());
  return value ? value : "";
}

std::string HttpBackend::complete(const ModelRequest& request) {
  json body = {
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
  };
  HttpResponse res =
      transport_->post(config_.base_url, "/v1/chat/completions", body.dump(), api_key());
  if (res.status == 429 || res.status >= 500) {
    throw GatewayError("provider returned status " + std::to_string(res.status),
                       /*retryable=*/true, res.status);
  }
  if (res.status != 200) {
    throw GatewayError("provider returned status " + std::to_string(res.status),
                       /*retryable=*/false, res.status);
  }
  json doc = json::parse(res.body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("choices") || doc["choices"].empty()) {
    throw GatewayError("provider response missing choices", /*retryable=*/false);
  }
  return doc["choices"][0].value("message", json::object()).value("content", "");
}

std::vector<std::vector<double>> HttpBackend::embed(
    const std::vector<std::string>& texts) {
  json body = {{"model", config_.model}, {"input", texts}};
  HttpResponse res =
      transport_->post(config_.base_url, "/v1/embeddings", body.dump(), api_key());
  if (res.status == 429 || res.status >= 500) {
    throw GatewayError("provider returned status " + std::to_string(res.status),
                       /*retryable=*/true, res.status);
  }
  if (res.status != 200) {
    throw GatewayError("provider returned status " + std::to_string(res.status),
                       /*retryable=*/false, res.status);
  }
  json doc = json::parse(res.body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("data")) {
    throw GatewayError("provider response missing data", /*retryable=*/false);
  }
  std::vector<std::vector<double>> out;
  for (const auto& item : doc["data"]) {
    auto vec = item.value("embedding", std::vector<double>{});
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (double& x : vec) x /= norm;
    }
    out.push_back(std::move(vec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gateway

void Gateway::set_default_backend(std::shared_ptr<CompletionBackend> backend) {
  default_backend_ = std::move(backend);
}

void Gateway::set_backend(Purpose purpose,
                          std::shared_ptr<CompletionBackend> backend) {
  backends_[purpose] = std::move(backend);
}

void Gateway::set_embedding_backend(std::shared_ptr<EmbeddingBackend> backend) {
  embedder_ = std::move(backend);
}

CompletionBackend* Gateway::backend_for(Purpose purpose) const {
  auto it = backends_.find(purpose);
  if (it != backends_.end()) return it->second.get();
  return default_backend_.get();
}

std::string Gateway::complete(const ModelRequest& request) {
  CompletionBackend* backend = backend_for(request.purpose);
  if (!backend) {
    throw GatewayError("no backend configured for purpose '" +
                           std::string(to_string(request.purpose)) + "'",
                       /*retryable=*/false);
  }
  int attempt = 0;
  for (;;) {
    auto started = std::chrono::steady_clock::now();
    try {
      std::string response = backend->complete(request);
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
      record(request.purpose, request.model, request.prompt, response, elapsed);
      return response;
    } catch (const GatewayError& err) {
      if (!err.retryable() || attempt >= retries_) throw;
      ++attempt;
      if (backoff_ms_ > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(backoff_ms_ * (1 << (attempt - 1))));
      }
    }
  }
}

std::vector<std::vector<double>> Gateway::embed(
    const std::vector<std::string>& texts) {
  if (!embedder_) {
    throw GatewayError("no embedding backend configured", /*retryable=*/false);
  }
  int attempt = 0;
  for (;;) {
    auto started = std::chrono::steady_clock::now();
    try {
      auto vectors = embedder_->embed(texts);
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
      for (std::size_t i = 0; i < texts.size(); ++i) {
        record(Purpose::embed, embedder_->id(), texts[i], "", elapsed);
      }
      return vectors;
    } catch (const GatewayError& err) {
      if (!err.retryable() || attempt >= retries_) throw;
      ++attempt;
      if (backoff_ms_ > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(backoff_ms_ * (1 << (attempt - 1))));
      }
    }
  }
}

std::vector<AuditEntry> Gateway::audit_log() const {
  std::lock_guard<std::mutex> lock(audit_mutex_);
  return audit_;
}

void Gateway::record(Purpose purpose, const std::string& model,
                     const std::string& prompt, const std::string& response,
                     long latency_ms) {
  std::lock_guard<std::mutex> lock(audit_mutex_);
  audit_.push_back({purpose, model, text::digest_hex(prompt),
                    text::digest_hex(response), latency_ms});
}

}  // namespace adaptqa::llm

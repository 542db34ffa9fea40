#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adaptqa::llm {

/// Every outbound model call carries a purpose tag; it drives scripted
/// routing, per-purpose backend selection, and the audit log.
enum class Purpose {
  generation,
  sufficiency,
  action_select,
  param_fill,
  rubric,
  faithfulness,
  claims,
  embed,
};

std::string_view to_string(Purpose p);
std::optional<Purpose> purpose_from_string(std::string_view s);

struct ModelRequest {
  Purpose purpose = Purpose::generation;
  std::string prompt;
  std::string model;       // provider model identity (audit + routing)
  std::string shape_hint;  // expected output shape, e.g. "integer 0-3"
};

class GatewayError : public std::runtime_error {
 public:
  GatewayError(const std::string& what, bool retryable, int status = 0)
      : std::runtime_error(what), retryable_(retryable), status_(status) {}

  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const ModelRequest& request) = 0;
  virtual std::string name() const = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) = 0;
  virtual std::string id() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend (deterministic test mode)

struct ScriptedEntry {
  std::optional<Purpose> purpose;  // nullopt = any purpose
  std::string match;               // substring of the prompt; empty = any
  std::string model;               // substring of the model id; empty = any
  std::string response;
  int max_uses = -1;  // -1 = unlimited
  int uses = 0;
};

/// Ordered fixture: the first entry whose purpose/matcher/model accept the
/// request (and whose use budget is not exhausted) answers it. No match
/// falls back to the default response, or fails the run in strict mode.
class ScriptedBackend : public CompletionBackend {
 public:
  ScriptedBackend(std::vector<ScriptedEntry> entries, std::string fallback,
                  bool strict);

  /// JSON fixture: {"strict": bool, "fallback": str,
  ///                "entries": [{"purpose": str, "match": str, "model": str,
  ///                             "response": str, "max_uses": int}, ...]}
  static std::shared_ptr<ScriptedBackend> load(const std::filesystem::path& file);

  std::string complete(const ModelRequest& request) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<ScriptedEntry> entries_;
  std::string fallback_;
  bool strict_;
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Deterministic token-hash embedder (test mode)

/// Hashes each token onto a coordinate and L2-normalizes the counts.
/// Text with no tokens embeds to the first basis vector.
class HashEmbedder : public EmbeddingBackend {
 public:
  explicit HashEmbedder(std::size_t dimension = 64);

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override;
  std::string id() const override;
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

// ---------------------------------------------------------------------------
// HTTP backend (OpenAI-style chat/embeddings wire format)

struct HttpProviderConfig {
  std::string base_url;     // e.g. "http://localhost:8080"
  std::string model;        // provider model name
  std::string api_key_env;  // env var holding the key; never the key itself
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Transport seam: production uses cpp-httplib, tests inject failures.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& base_url, const std::string& path,
                            const std::string& body,
                            const std::string& api_key) = 0;
};

std::shared_ptr<HttpTransport> make_default_transport();

class HttpBackend : public CompletionBackend, public EmbeddingBackend {
 public:
  HttpBackend(HttpProviderConfig config,
              std::shared_ptr<HttpTransport> transport = nullptr);

  std::string complete(const ModelRequest& request) override;
  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override;
  std::string name() const override { return "http:" + config_.model; }
  std::string id() const override { return "http:" + config_.model; }

 private:
  std::string api_key() const;

  HttpProviderConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

// ---------------------------------------------------------------------------
// Gateway

struct AuditEntry {
  Purpose purpose = Purpose::generation;
  std::string model;
  std::string prompt_digest;    // fnv1a64 hex of the prompt
  std::string response_digest;  // fnv1a64 hex of the response
  long latency_ms = 0;          // kept out of traces; runs stay reproducible
};

/// Single choke point for completions and embeddings: per-purpose backend
/// routing, bounded retries with exponential backoff, and an audit log.
/// Shareable across concurrent sessions.
class Gateway {
 public:
  void set_default_backend(std::shared_ptr<CompletionBackend> backend);
  void set_backend(Purpose purpose, std::shared_ptr<CompletionBackend> backend);
  void set_embedding_backend(std::shared_ptr<EmbeddingBackend> backend);
  void set_retries(int retries) { retries_ = retries; }
  void set_backoff_ms(int ms) { backoff_ms_ = ms; }

  /// Throws GatewayError after the retry budget is exhausted, or when no
  /// backend serves the request's purpose.
  std::string complete(const ModelRequest& request);

  /// Unit vectors, one per input text.
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

  std::vector<AuditEntry> audit_log() const;

 private:
  CompletionBackend* backend_for(Purpose purpose) const;
  void record(Purpose purpose, const std::string& model,
              const std::string& prompt, const std::string& response,
              long latency_ms);

  std::shared_ptr<CompletionBackend> default_backend_;
  std::map<Purpose, std::shared_ptr<CompletionBackend>> backends_;
  std::shared_ptr<EmbeddingBackend> embedder_;
  int retries_ = 2;
  int backoff_ms_ = 200;

  mutable std::mutex audit_mutex_;
  std::vector<AuditEntry> audit_;
};

}  // namespace adaptqa::llm

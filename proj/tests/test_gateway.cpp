#include <doctest.h>

#include <cmath>

#include "adaptqa/gateway.hpp"
#include "helpers.hpp"

using namespace adaptqa;
using llm::Gateway;
using llm::GatewayError;
using llm::HashEmbedder;
using llm::HttpBackend;
using llm::HttpProviderConfig;
using llm::ModelRequest;
using llm::Purpose;

TEST_CASE("scripted backend returns the matched fixture entry") {
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(testutil::scripted(
      {testutil::entry(Purpose::sufficiency, "", "sufficient")}));
  ModelRequest request;
  request.purpose = Purpose::sufficiency;
  request.prompt = "anything";
  CHECK(gateway.complete(request) == "sufficient");
  CHECK(gateway.complete(request) == "sufficient");  // deterministic
}

TEST_CASE("scripted entries are purpose and substring keyed, in order") {
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(testutil::scripted(
      {testutil::entry(Purpose::rubric, "Context:", "1"),
       testutil::entry(Purpose::rubric, "", "2"),
       testutil::entry(Purpose::generation, "", "text")},
      "fallback"));
  ModelRequest rubric;
  rubric.purpose = Purpose::rubric;
  rubric.prompt = "Context: grade it";
  CHECK(gateway.complete(rubric) == "1");
  rubric.prompt = "Accuracy: grade it";
  CHECK(gateway.complete(rubric) == "2");
  ModelRequest other;
  other.purpose = Purpose::claims;
  other.prompt = "x";
  CHECK(gateway.complete(other) == "fallback");
}

TEST_CASE("scripted max_uses consumes entries in order") {
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(testutil::scripted(
      {testutil::entry(Purpose::rubric, "", "5", 1),
       testutil::entry(Purpose::rubric, "", "2")}));
  ModelRequest request;
  request.purpose = Purpose::rubric;
  request.prompt = "grade";
  CHECK(gateway.complete(request) == "5");
  CHECK(gateway.complete(request) == "2");
  CHECK(gateway.complete(request) == "2");
}

TEST_CASE("strict scripted mode fails on unmatched requests") {
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(testutil::scripted({}, "", /*strict=*/true));
  ModelRequest request;
  request.purpose = Purpose::generation;
  CHECK_THROWS_AS(gateway.complete(request), GatewayError);
}

TEST_CASE("scripted model matcher distinguishes evaluators") {
  llm::ScriptedEntry a;
  a.purpose = Purpose::rubric;
  a.model = "evaluator-a";
  a.response = "3";
  llm::ScriptedEntry b;
  b.purpose = Purpose::rubric;
  b.model = "evaluator-b";
  b.response = "1";
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(testutil::scripted({a, b}));
  ModelRequest request;
  request.purpose = Purpose::rubric;
  request.model = "evaluator-b";
  CHECK(gateway.complete(request) == "1");
}

TEST_CASE("hash embedder is deterministic, unit norm, e1 for empty") {
  HashEmbedder embedder(64);
  auto a = embedder.embed({"wheat rain", "wheat rain", ""});
  REQUIRE(a.size() == 3);
  CHECK(a[0] == a[1]);
  for (const auto& vec : a) {
    REQUIRE(vec.size() == 64);
    double norm = 0.0;
    for (double x : vec) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-9);
  }
  CHECK(a[2][0] == 1.0);
  for (std::size_t i = 1; i < 64; ++i) CHECK(a[2][i] == 0.0);
}

namespace {

class FailingTransport : public llm::HttpTransport {
 public:
  explicit FailingTransport(int failures, int status = 500)
      : failures_(failures), status_(status) {}

  llm::HttpResponse post(const std::string&, const std::string&,
                         const std::string&, const std::string&) override {
    ++calls_;
    if (calls_ <= failures_) return {status_, "boom"};
    return {200,
            R"({"choices":[{"message":{"content":"recovered"}}]})"};
  }

  int calls() const { return calls_; }

 private:
  int failures_;
  int status_;
  int calls_ = 0;
};

}  // namespace

TEST_CASE("http backend surfaces a retryable error after the retry budget") {
  auto transport = std::make_shared<FailingTransport>(3);
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_retries(2);
  gateway.set_default_backend(std::make_shared<HttpBackend>(
      HttpProviderConfig{"http://example.test", "m", ""}, transport));
  ModelRequest request;
  request.purpose = Purpose::generation;
  CHECK_THROWS_AS(gateway.complete(request), GatewayError);
  CHECK(transport->calls() == 3);  // initial + 2 retries
}

TEST_CASE("http backend recovers within the retry budget") {
  auto transport = std::make_shared<FailingTransport>(2);
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_retries(2);
  gateway.set_default_backend(std::make_shared<HttpBackend>(
      HttpProviderConfig{"http://example.test", "m", ""}, transport));
  ModelRequest request;
  request.purpose = Purpose::generation;
  CHECK(gateway.complete(request) == "recovered");
}

TEST_CASE("non-retryable provider status is not retried") {
  auto transport = std::make_shared<FailingTransport>(5, 400);
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_retries(2);
  gateway.set_default_backend(std::make_shared<HttpBackend>(
      HttpProviderConfig{"http://example.test", "m", ""}, transport));
  ModelRequest request;
  request.purpose = Purpose::generation;
  CHECK_THROWS_AS(gateway.complete(request), GatewayError);
  CHECK(transport->calls() == 1);
}

TEST_CASE("audit log records every outbound call with its purpose") {
  Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_default_backend(
      testutil::scripted({testutil::entry(Purpose::generation, "", "ok")}));
  gateway.set_embedding_backend(std::make_shared<HashEmbedder>(16));
  ModelRequest request;
  request.purpose = Purpose::generation;
  request.prompt = "p";
  gateway.complete(request);
  gateway.embed({"a", "b"});
  auto log = gateway.audit_log();
  REQUIRE(log.size() == 3);
  CHECK(log[0].purpose == Purpose::generation);
  CHECK(log[1].purpose == Purpose::embed);
  CHECK(log[2].purpose == Purpose::embed);
  CHECK(log[0].prompt_digest.size() == 16);
}

TEST_CASE("purpose tags round trip through names") {
  for (auto purpose :
       {Purpose::generation, Purpose::sufficiency, Purpose::action_select,
        Purpose::param_fill, Purpose::rubric, Purpose::faithfulness,
        Purpose::claims, Purpose::embed}) {
    auto name = llm::to_string(purpose);
    auto back = llm::purpose_from_string(name);
    REQUIRE(back.has_value());
    CHECK(*back == purpose);
  }
  CHECK_FALSE(llm::purpose_from_string("nope").has_value());
}

TEST_CASE("scripted fixture files load with purposes and uses") {
  testutil::TempDir dir;
  testutil::write_file(dir.path() / "fixture.json", R"({
    "strict": false,
    "fallback": "fb",
    "entries": [
      {"purpose": "generation", "match": "x", "response": "gen", "max_uses": 1},
      {"purpose": "claims", "response": "claim: c1"}
    ]
  })");
  auto backend = llm::ScriptedBackend::load(dir.path() / "fixture.json");
  ModelRequest request;
  request.purpose = Purpose::generation;
  request.prompt = "has x inside";
  CHECK(backend->complete(request) == "gen");
  CHECK(backend->complete(request) == "fb");  // max_uses exhausted
  CHECK_THROWS_AS(llm::ScriptedBackend::load(dir.path() / "missing.json"),
                  std::runtime_error);
}

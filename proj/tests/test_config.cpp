#include <doctest.h>

#include "adaptqa/config.hpp"
#include "helpers.hpp"

using namespace adaptqa;

TEST_CASE("defaults are valid and scripted") {
  RunConfig config;
  CHECK_NOTHROW(config.validate());
  CHECK(config.retrieval.beta == 0.3);
  CHECK(config.retrieval.lambda == 0.5);
  CHECK(config.retrieval.k == 8);
  CHECK(config.eval.alpha == 0.5);
  CHECK(config.loop.max_iterations == 3);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"retrival": {}})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"retrieval": {"betta": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_json_text(R"({"eval": {"alpha": 0.5, "extra": 1}})"),
      ConfigError);
}

TEST_CASE("out-of-range values are rejected before any work") {
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"retrieval": {"beta": 1.5}})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"retrieval": {"lambda": -0.2}})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"eval": {"alpha": 2.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"retrieval": {"k": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_json_text(
          R"({"chunking": {"size_words": 50, "overlap_words": 50}})"),
      ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"loop": {"max_iterations": 0}})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_json_text(R"({"eval": {"mode": "three-shot"}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_json_text(R"({"backends": {"default": "psychic"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_json_text(R"({"backends": {"overrides": {"embed": "x"}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_json_text(R"({"backends": {"models": {"nonsense": "m"}}})"),
      ConfigError);
}

TEST_CASE("a full config round trips") {
  auto config = RunConfig::parse_json_text(R"({
    "paths": {"corpus": "c.jsonl", "gazetteer": "g.tsv", "trace": "t.json"},
    "retrieval": {"lambda": 0.4, "beta": 0.2, "k": 5, "k1": 1.5, "b": 0.6},
    "chunking": {"size_words": 200, "overlap_words": 20},
    "loop": {"max_iterations": 2, "max_subq": 1, "climate": false},
    "eval": {"alpha": 0.7, "theta": 0.5, "seed": 9,
             "evaluators": ["e1", "e2"], "mode": "few-shot"},
    "backends": {"default": "scripted", "models": {"generation": "g-model"}}
  })");
  CHECK(config.paths.corpus == "c.jsonl");
  CHECK(config.retrieval.lambda == 0.4);
  CHECK(config.retrieval.bm25.k1 == 1.5);
  CHECK(config.chunking.size_words == 200);
  CHECK(config.loop.max_iterations == 2);
  CHECK_FALSE(config.loop.climate);
  CHECK(config.eval.alpha == 0.7);
  CHECK(config.eval.evaluators.size() == 2);
  CHECK(config.model_for("generation") == "g-model");
  CHECK(config.model_for("sufficiency") == "offline");
}

TEST_CASE("config file loading reports missing files") {
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), ConfigError);
  testutil::TempDir dir;
  testutil::write_file(dir.path() / "bad.json", "not json");
  CHECK_THROWS_AS(RunConfig::load(dir.path() / "bad.json"), ConfigError);
}

TEST_CASE("make_gateway wires a scripted default and the hash embedder") {
  testutil::TempDir dir;
  testutil::write_file(dir.path() / "scripted.json", R"({
    "fallback": "fb",
    "entries": [{"purpose": "generation", "response": "scripted!"}]
  })");
  RunConfig config;
  config.paths.scripted_fixture = (dir.path() / "scripted.json").string();
  config.backends.backoff_ms = 0;
  auto gateway = make_gateway(config);
  llm::ModelRequest request;
  request.purpose = llm::Purpose::generation;
  CHECK(gateway->complete(request) == "scripted!");
  auto vectors = gateway->embed({"some text"});
  REQUIRE(vectors.size() == 1);
  CHECK(vectors[0].size() == 64);
}

TEST_CASE("http default without providers is a config error") {
  RunConfig config;
  config.backends.default_kind = "http";
  CHECK_THROWS_AS(make_gateway(config), ConfigError);
}

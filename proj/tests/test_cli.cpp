#include <doctest.h>

#include <nlohmann/json.hpp>

#include "adaptqa/sample_data.hpp"
#include "helpers.hpp"

using nlohmann::json;
using testutil::run_command;

namespace {

std::string cli() { return "'" + testutil::cli_path().string() + "'"; }

/// Fixture workspace with ingest already run.
struct Workspace {
  testutil::TempDir dir;

  Workspace() {
    adaptqa::sample::write_sample_workspace(dir.path());
    auto ingest = run_command(cli() + " ingest", dir.path());
    REQUIRE_MESSAGE(ingest.exit_code == 0, ingest.output);
  }
};

const char* kQuestion =
    "How should wheat growers near Picton adapt to declining winter rainfall?";

}  // namespace

TEST_CASE("ingest reports stats and exit 0 on the fixture corpus") {
  testutil::TempDir dir;
  adaptqa::sample::write_sample_workspace(dir.path());
  auto result = run_command(cli() + " ingest", dir.path());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("documents: 6") != std::string::npos);
  CHECK(result.output.find("chunks: 6") != std::string::npos);
  CHECK(result.output.find("rejects: 0") != std::string::npos);
}

TEST_CASE("ingest of a missing corpus file fails with a message") {
  testutil::TempDir dir;
  adaptqa::sample::write_sample_workspace(dir.path());
  auto result =
      run_command(cli() + " ingest --corpus does-not-exist.jsonl", dir.path());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("error") != std::string::npos);
}

TEST_CASE("ingest skips a bad record but succeeds") {
  testutil::TempDir dir;
  adaptqa::sample::write_sample_workspace(dir.path());
  // Append a record with no body.
  auto corpus = testutil::read_file(dir.path() / "corpus.jsonl");
  corpus += json{{"doc_id", "d-broken"}, {"title", "no body"}}.dump() + "\n";
  testutil::write_file(dir.path() / "corpus.jsonl", corpus);
  auto result = run_command(cli() + " ingest", dir.path());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("rejects: 1") != std::string::npos);
  CHECK(result.output.find("empty body") != std::string::npos);
}

TEST_CASE("ask without an index gives a remediation hint") {
  testutil::TempDir dir;
  adaptqa::sample::write_sample_workspace(dir.path());
  auto result = run_command(cli() + " ask \"anything\"", dir.path());
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("ingest") != std::string::npos);
}

TEST_CASE("ask produces the golden answer and is byte-stable across runs") {
  Workspace ws;
  std::string command = cli() + " ask \"" + std::string(kQuestion) + "\"";
  auto first = run_command(command, ws.dir.path());
  REQUIRE_MESSAGE(first.exit_code == 0, first.output);
  auto first_trace = testutil::read_file(ws.dir.path() / "trace.json");

  for (int run = 0; run < 2; ++run) {
    auto again = run_command(command, ws.dir.path());
    CHECK(again.exit_code == 0);
    CHECK(again.output == first.output);
    CHECK(testutil::read_file(ws.dir.path() / "trace.json") == first_trace);
  }

  std::string hint;
  CHECK_MESSAGE(testutil::matches_golden(first.output, "ask_output.txt", &hint),
                hint);

  // The paper-anchored verbalisation reaches the final evidence list.
  CHECK(first.output.find("the average rainfall in Picton is 835 mm") !=
        std::string::npos);
}

TEST_CASE("ask with beta zero traces a pure base ranking") {
  Workspace ws;
  auto result = run_command(
      cli() + " ask --beta 0 --trace trace-b0.json \"" + std::string(kQuestion) +
          "\"",
      ws.dir.path());
  REQUIRE_MESSAGE(result.exit_code == 0, result.output);
  auto trace = json::parse(testutil::read_file(ws.dir.path() / "trace-b0.json"));
  const auto& candidates = trace["iterations"][0]["retrievals"][0]["candidates"];
  REQUIRE(!candidates.empty());
  for (const auto& cand : candidates) {
    CHECK(cand["final"].get<double>() == cand["base"].get<double>());
  }
}

TEST_CASE("ask with an unknown location keeps LocSim neutral") {
  Workspace ws;
  auto result = run_command(
      cli() + " ask --trace trace-loc.json \"How should growers in Atlantis "
              "handle drought?\"",
      ws.dir.path());
  REQUIRE_MESSAGE(result.exit_code == 0, result.output);
  auto trace = json::parse(testutil::read_file(ws.dir.path() / "trace-loc.json"));
  const auto& candidates = trace["iterations"][0]["retrievals"][0]["candidates"];
  REQUIRE(!candidates.empty());
  for (const auto& cand : candidates) {
    CHECK(cand["loc_sim"].get<double>() == 0.0);
  }
}

TEST_CASE("ask rejects out-of-range overrides before any work") {
  Workspace ws;
  auto result = run_command(cli() + " ask --beta 1.5 \"q\"", ws.dir.path());
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("beta") != std::string::npos);
}

TEST_CASE("calibrate writes the closed-form weights file") {
  Workspace ws;
  auto result = run_command(
      cli() + " calibrate annotations.csv evaluator_scores.csv -o weights.json",
      ws.dir.path());
  REQUIRE_MESSAGE(result.exit_code == 0, result.output);
  auto weights = json::parse(testutil::read_file(ws.dir.path() / "weights.json"));

  // Worked normalization example: kappas (0.6, -0.2, 0.2) -> (0.75, 0, 0.25).
  const auto& accuracy = weights["dimensions"]["accuracy"]["evaluators"];
  CHECK(accuracy["gemini-flash-eval"]["weight"].get<double>() == 0.75);
  CHECK(accuracy["gpt-mini-eval"]["weight"].get<double>() == 0.0);
  CHECK(accuracy["deepseek-eval"]["weight"].get<double>() == 0.25);

  // A perfectly agreeing evaluator dominates its dimension outright.
  const auto& citations = weights["dimensions"]["citations"]["evaluators"];
  CHECK(citations["gemini-flash-eval"]["weight"].get<double>() == 1.0);
  CHECK(citations["gemini-flash-eval"]["kappa"].get<double>() == 1.0);
  CHECK(citations["gpt-mini-eval"]["weight"].get<double>() == 0.0);
  CHECK(citations["deepseek-eval"]["weight"].get<double>() == 0.0);

  // The kappa/CI table (one row per dimension) reaches stdout.
  CHECK(result.output.find("accuracy") != std::string::npos);
  CHECK(result.output.find("[") != std::string::npos);
}

TEST_CASE("calibrate with empty annotations fails") {
  Workspace ws;
  testutil::write_file(ws.dir.path() / "empty.csv",
                       "question_id,answer_id,annotator_id,dimension,score\n");
  auto result = run_command(
      cli() + " calibrate empty.csv evaluator_scores.csv -o w.json",
      ws.dir.path());
  CHECK(result.exit_code == 2);
}

TEST_CASE("evaluate emits a Table-1 shaped report") {
  Workspace ws;
  auto calibrate = run_command(
      cli() + " calibrate annotations.csv evaluator_scores.csv -o weights.json",
      ws.dir.path());
  REQUIRE(calibrate.exit_code == 0);
  auto result = run_command(
      cli() + " evaluate answers.json weights.json -o report.csv", ws.dir.path());
  REQUIRE_MESSAGE(result.exit_code == 0, result.output);
  auto csv = testutil::read_file(ws.dir.path() / "report.csv");
  CHECK(csv.rfind("Method,Context,Structure,Language,Citations,Specificity,"
                  "Compreh.,Accuracy,AVG,CitRate,FaithRate\n",
                  0) == 0);
  // Two answer sets -> two data rows.
  CHECK(csv.find("\nassisted,") != std::string::npos);
  CHECK(csv.find("\nbaseline,") != std::string::npos);
  // The footer states the +- and metric conventions.
  CHECK(csv.find("sample standard deviation") != std::string::npos);
}

TEST_CASE("evaluate with identity weights scores an all-3 answer as 3.0 across") {
  Workspace ws;
  json weights = {{"version", 1}, {"warnings", json::array()}};
  json dims = json::object();
  for (const char* dim : {"context", "structure", "language", "comprehensiveness",
                          "specificity", "citations", "accuracy"}) {
    dims[dim] = {{"evaluators", {{"solo", {{"weight", 1.0}}}}},
                 {"degenerate", false}};
  }
  weights["dimensions"] = dims;
  testutil::write_file(ws.dir.path() / "identity.json", weights.dump());

  json answers = {
      {"sets",
       json::array({json{
           {"name", "solo-set"},
           {"answers", json::array({json{{"answer_id", "a1"},
                                         {"question", "q"},
                                         {"text", "All good [1]."},
                                         {"evidence",
                                          json::array({json{
                                              {"kind", "literature"},
                                              {"text", "All good evidence."},
                                              {"source", "s"}}})}}})}}})}};
  testutil::write_file(ws.dir.path() / "solo_answers.json", answers.dump());

  json scripted = {
      {"fallback", ""},
      {"entries", json::array({json{{"purpose", "rubric"}, {"response", "3"}},
                               json{{"purpose", "claims"},
                                    {"response", "claim: all good evidence"}},
                               json{{"purpose", "faithfulness"},
                                    {"response", "1.0"}}})}};
  testutil::write_file(ws.dir.path() / "solo_scripted.json", scripted.dump());

  json config = {{"paths", {{"scripted_fixture", "solo_scripted.json"}}},
                 {"eval", {{"evaluators", json::array({"solo"})}}},
                 {"backends", {{"backoff_ms", 0}}}};
  testutil::write_file(ws.dir.path() / "solo_config.json", config.dump());

  auto result = run_command(
      cli() + " -c solo_config.json evaluate solo_answers.json identity.json "
              "-o solo_report.csv",
      ws.dir.path());
  REQUIRE_MESSAGE(result.exit_code == 0, result.output);
  auto csv = testutil::read_file(ws.dir.path() / "solo_report.csv");
  CHECK(csv.find("solo-set,3.00±0.00,3.00±0.00,3.00±0.00,3.00±0.00,3.00±0.00,"
                 "3.00±0.00,3.00±0.00,3.00±0.00,1.000,1.000") !=
        std::string::npos);
}

TEST_CASE("fixtures command writes a usable workspace") {
  testutil::TempDir dir;
  auto result = run_command(cli() + " fixtures ws", dir.path());
  CHECK(result.exit_code == 0);
  CHECK(std::filesystem::exists(dir.path() / "ws" / "corpus.jsonl"));
  CHECK(std::filesystem::exists(dir.path() / "ws" / "config.json"));
  CHECK(std::filesystem::exists(dir.path() / "ws" / "climate" / "precipitation.json"));
}

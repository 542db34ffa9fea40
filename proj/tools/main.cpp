#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using adaptqa::RunConfig;
using namespace adaptqa::cli;

int main(int argc, char** argv) {
  CLI::App app{"Location-aware retrieval, answer generation and calibrated "
               "evaluation for climate adaptation QA"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON run configuration")
      ->envname("ADAPTQA_CONFIG");

  auto* ingest = app.add_subcommand("ingest", "Ingest a corpus and build indexes");
  std::string ingest_corpus;
  ingest->add_option("--corpus", ingest_corpus, "Corpus file (JSONL), overrides config");

  auto* ask = app.add_subcommand("ask", "Answer a question against the index");
  std::string question;
  ask->add_option("question", question, "The question to answer")->required();
  AskOverrides overrides;
  double beta = 0.0, lambda = 0.0;
  int k = 0, max_iterations = 0;
  std::string trace_path;
  auto* beta_opt = ask->add_option("--beta", beta, "Location weight in [0,1]");
  auto* lambda_opt = ask->add_option("--lambda", lambda, "Sparse/dense blend in [0,1]");
  auto* k_opt = ask->add_option("-k", k, "Results per retrieval");
  auto* iter_opt =
      ask->add_option("--max-iterations", max_iterations, "Reasoning loop budget");
  auto* trace_opt = ask->add_option("--trace", trace_path, "Trace output path");

  auto* calibrate = app.add_subcommand(
      "calibrate", "Derive evaluator reliability weights from annotations");
  std::string annotations_path, scores_path, weights_out = "weights.json";
  calibrate->add_option("annotations", annotations_path, "Human annotations CSV")
      ->required();
  calibrate->add_option("scores", scores_path, "Evaluator scores CSV")->required();
  calibrate->add_option("-o,--out", weights_out, "Weights output path");

  auto* evaluate =
      app.add_subcommand("evaluate", "Score answer sets with the hybrid evaluator");
  std::string answers_path, weights_path, report_out = "report.csv";
  evaluate->add_option("answers", answers_path, "Answer sets JSON")->required();
  evaluate->add_option("weights", weights_path, "Calibrated weights JSON")
      ->required();
  evaluate->add_option("-o,--out", report_out, "Report output path");

  auto* fixtures =
      app.add_subcommand("fixtures", "Emit a sample workspace with demo data");
  std::string fixtures_dir = "fixtures";
  fixtures->add_option("dir", fixtures_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  RunConfig config;
  try {
    if (!config_path.empty()) {
      config = RunConfig::load(config_path);
    } else if (std::filesystem::exists("config.json")) {
      config = RunConfig::load("config.json");
    }
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*ingest) {
      if (!ingest_corpus.empty()) config.paths.corpus = ingest_corpus;
      return cmd_ingest(config);
    }
    if (*ask) {
      if (*beta_opt) overrides.beta = beta;
      if (*lambda_opt) overrides.lambda = lambda;
      if (*k_opt) overrides.k = k;
      if (*iter_opt) overrides.max_iterations = max_iterations;
      if (*trace_opt) overrides.trace_path = trace_path;
      // Range-check overrides before any work starts.
      auto effective = config.retrieval;
      if (overrides.beta) effective.beta = *overrides.beta;
      if (overrides.lambda) effective.lambda = *overrides.lambda;
      if (overrides.k) effective.k = *overrides.k;
      effective.validate();
      if (overrides.max_iterations && *overrides.max_iterations < 1) {
        throw std::invalid_argument("--max-iterations must be >= 1");
      }
      return cmd_ask(config, question, overrides);
    }
    if (*calibrate) {
      return cmd_calibrate(config, annotations_path, scores_path, weights_out);
    }
    if (*evaluate) {
      return cmd_evaluate(config, answers_path, weights_path, report_out);
    }
    if (*fixtures) {
      return cmd_fixtures(fixtures_dir);
    }
  } catch (const adaptqa::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

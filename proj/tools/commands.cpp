#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <fmt/core.h>

#include "adaptqa/agreement.hpp"
#include "adaptqa/climate.hpp"
#include "adaptqa/generation.hpp"
#include "adaptqa/index_io.hpp"
#include "adaptqa/report.hpp"
#include "adaptqa/sample_data.hpp"

namespace adaptqa::cli {

namespace fs = std::filesystem;

int cmd_ingest(const RunConfig& config) {
  if (config.paths.corpus.empty()) {
    std::cerr << "error: no corpus path configured\n";
    return kExitUsage;
  }
  try {
    geo::Gazetteer gazetteer;
    if (!config.paths.gazetteer.empty()) {
      gazetteer = geo::Gazetteer::load(config.paths.gazetteer);
    }
    auto gateway = make_gateway(config);

    CorpusIndex index;
    index.policy = config.chunking;
    auto stats = index.store.ingest_file(config.paths.corpus, config.chunking,
                                         &gazetteer);
    index.sparse = retrieval::SparseIndex::build(index.store.chunks());
    index.dense = retrieval::DenseIndex::build(index.store.chunks(), *gateway);
    save_index(config.paths.index, index);

    fmt::print("documents: {}\n", stats.documents);
    fmt::print("chunks: {}\n", stats.chunks);
    fmt::print("rejects: {}\n", stats.rejects.size());
    for (const auto& reject : stats.rejects) {
      fmt::print("  line {}: {}{}\n", reject.line, reject.reason,
                 reject.doc_id.empty() ? "" : " (" + reject.doc_id + ")");
    }
    fmt::print("index written to {}\n", config.paths.index);
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_ask(const RunConfig& config, const std::string& question,
            const AskOverrides& overrides) {
  try {
    if (!fs::exists(config.paths.index)) {
      std::cerr << "error: no index at '" << config.paths.index
                << "'; run `adaptqa ingest` first\n";
      return kExitRuntime;
    }
    geo::Gazetteer gazetteer;
    if (!config.paths.gazetteer.empty()) {
      gazetteer = geo::Gazetteer::load(config.paths.gazetteer);
    }
    auto gateway = make_gateway(config);
    auto index = load_index(config.paths.index);

    retrieval::Retriever retriever(index->store, index->sparse, index->dense,
                                   gazetteer, *gateway);

    std::unique_ptr<climate::ClimateClient> climate_client;
    std::unique_ptr<climate::ActionCatalog> catalog;
    std::unique_ptr<climate::ClimatePipeline> pipeline;
    if (!config.paths.catalog.empty()) {
      catalog = std::make_unique<climate::ActionCatalog>(
          climate::ActionCatalog::load(config.paths.catalog));
      if (!config.backends.climate_base_url.empty()) {
        climate_client = std::make_unique<climate::HttpClimateClient>(
            config.backends.climate_base_url, config.backends.climate_api_key_env);
      } else {
        climate_client = std::make_unique<climate::FixtureClimateClient>(
            config.paths.climate_fixtures.empty()
                ? "climate"
                : config.paths.climate_fixtures);
      }
      pipeline = std::make_unique<climate::ClimatePipeline>(
          catalog.get(), climate_client.get(), &gazetteer, gateway.get(),
          config.model_for("action-select"), config.model_for("param-fill"));
    }

    gen::LoopConfig loop;
    loop.max_iterations = overrides.max_iterations.value_or(config.loop.max_iterations);
    loop.max_subq = config.loop.max_subq;
    loop.climate_enabled = config.loop.climate;
    loop.retrieval = config.retrieval;
    if (overrides.beta) loop.retrieval.beta = *overrides.beta;
    if (overrides.lambda) loop.retrieval.lambda = *overrides.lambda;
    if (overrides.k) loop.retrieval.k = *overrides.k;
    loop.retrieval.validate();
    loop.generation_model = config.model_for("generation");
    loop.sufficiency_model = config.model_for("sufficiency");

    gen::Services services;
    services.retriever = &retriever;
    services.gateway = gateway.get();
    services.gazetteer = &gazetteer;
    services.climate = pipeline.get();

    gen::FinalAnswer answer = gen::react_loop(question, loop, services);

    const std::string trace_path =
        overrides.trace_path.value_or(config.paths.trace);
    if (!trace_path.empty()) {
      std::ofstream trace_out(trace_path);
      if (!trace_out) {
        std::cerr << "error: cannot write trace to '" << trace_path << "'\n";
        return kExitRuntime;
      }
      trace_out << gen::trace_to_json(answer);
    }

    fmt::print("Answer ({})\n", gen::to_string(answer.status));
    fmt::print("------\n{}\n\n", answer.text);
    fmt::print("Evidence\n--------\n");
    for (const auto& item : answer.chain.items()) {
      fmt::print("[{}] {} ({})\n", item.ref_number, item.display_text,
                 item.source_label);
    }
    fmt::print("\nCitation report\n---------------\n");
    if (answer.report.dangling.empty()) {
      fmt::print("dangling citations: none\n");
    } else {
      std::string list;
      for (int n : answer.report.dangling) list += fmt::format(" [{}]", n);
      fmt::print("dangling citations:{}\n", list);
    }
    fmt::print("uncited declarative sentences: {} of {}\n",
               answer.report.uncited_sentences.size(),
               answer.report.declarative_sentences);
    if (answer.report.unused_refs.empty()) {
      fmt::print("unused evidence: none\n");
    } else {
      std::string list;
      for (int n : answer.report.unused_refs) list += fmt::format(" [{}]", n);
      fmt::print("unused evidence:{}\n", list);
    }
    if (!trace_path.empty()) {
      fmt::print("\ntrace: {}\n", trace_path);
    }
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_calibrate(const RunConfig& config, const std::string& annotations_path,
                  const std::string& scores_path, const std::string& out_path) {
  try {
    auto human = eval::AnnotationSet::load_csv(annotations_path);
    auto machine = eval::AnnotationSet::load_csv(scores_path);
    if (human.empty()) {
      std::cerr << "error: annotations file has no rows\n";
      return kExitRuntime;
    }
    eval::CalibrationOptions options;
    options.resamples = config.eval.bootstrap_resamples;
    options.level = config.eval.bootstrap_level;
    options.seed = config.eval.seed;
    options.weighting =
        *eval::kappa_weighting_from_string(config.eval.kappa_weighting);

    auto result = eval::calibrate_weights(human, machine, options);
    result.weights.save(out_path, result.profiles);

    // Per-dimension agreement table: evaluator kappa with its CI.
    fmt::print("{:<18}", "dimension");
    for (const auto& profile : result.profiles) {
      fmt::print("  {:>28}", profile.evaluator_id);
    }
    fmt::print("\n");
    for (const auto& [dim, weights] : result.weights.by_dimension) {
      (void)weights;
      fmt::print("{:<18}", dim);
      for (const auto& profile : result.profiles) {
        auto it = profile.per_dimension.find(dim);
        if (it == profile.per_dimension.end()) {
          fmt::print("  {:>28}", "-");
        } else {
          fmt::print("  {:>28}",
                     fmt::format("{:+.3f} [{:+.3f},{:+.3f}]", it->second.kappa,
                                 it->second.ci_lo, it->second.ci_hi));
        }
      }
      fmt::print("\n");
    }
    for (const auto& warning : result.weights.warnings) {
      fmt::print("warning: {}\n", warning);
    }
    fmt::print("weights written to {}\n", out_path);
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_evaluate(const RunConfig& config, const std::string& answers_path,
                 const std::string& weights_path, const std::string& out_path) {
  try {
    auto sets = eval::load_answer_sets(answers_path);
    auto weights = eval::HybridEvaluatorWeights::load(weights_path);
    auto gateway = make_gateway(config);

    eval::EvaluationOptions options;
    options.alpha = config.eval.alpha;
    options.theta = config.eval.theta;
    options.mode = *eval::scoring_mode_from_string(config.eval.mode);
    options.evaluators = config.eval.evaluators;
    options.faithfulness_model = config.model_for("faithfulness");
    options.claims_model = config.model_for("claims");
    if (options.mode == eval::ScoringMode::few_shot) {
      options.exemplars = eval::default_exemplars();
    }

    auto report = eval::evaluate_answer_sets(sets, weights, *gateway, options);

    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return kExitRuntime;
    }
    out << report.to_csv();
    fmt::print("{}", report.to_table());
    fmt::print("report written to {}\n", out_path);
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_fixtures(const std::string& out_dir) {
  try {
    sample::write_sample_workspace(out_dir);
    fmt::print("sample workspace written to {}\n", out_dir);
    fmt::print("try:\n  cd {}\n  adaptqa ingest\n  adaptqa ask \"{}\"\n",
               out_dir, sample::kDemoQuestion);
    return kExitOk;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace adaptqa::cli

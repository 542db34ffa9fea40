#pragma once

#include <filesystem>
#include <string>

namespace adaptqa::sample {

/// The question the bundled fixtures are scripted for.
extern const char* const kDemoQuestion;

/// Writes a self-contained demo workspace into `dir`: corpus.jsonl,
/// gazetteer.tsv, catalog.json, climate/ fixtures, scripted.json (gateway
/// fixture), annotations.csv, evaluator_scores.csv, answers.json, and a
/// config.json wiring them together with relative paths. Commands are meant
/// to run with `dir` as the working directory.
void write_sample_workspace(const std::filesystem::path& dir);

}  // namespace adaptqa::sample

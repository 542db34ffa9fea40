#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>

#include "adaptqa/corpus.hpp"
#include "adaptqa/gateway.hpp"
#include "adaptqa/geo.hpp"

namespace testutil {

namespace fs = std::filesystem;

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = fs::temp_directory_path() / "adaptqa-test-XXXXXX";
    std::string templ = base.string();
    if (!mkdtemp(templ.data())) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = templ;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

/// Runs a shell command with `cwd` as working directory.
inline CommandResult run_command(const std::string& command, const fs::path& cwd) {
  std::string full = "cd '" + cwd.string() + "' && " + command + " 2>&1";
  CommandResult result;
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) {
    result.output = "popen failed";
    return result;
  }
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof(buffer), pipe)) {
    result.output.append(buffer, n);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline fs::path cli_path() { return ADAPTQA_CLI_PATH; }
inline fs::path golden_dir() { return ADAPTQA_GOLDEN_DIR; }

inline bool update_golden() {
  const char* env = std::getenv("ADAPTQA_UPDATE_GOLDEN");
  return env && std::string(env) == "1";
}

/// Compares content against a golden file; with ADAPTQA_UPDATE_GOLDEN=1 it
/// (re)writes the golden instead.
inline bool matches_golden(const std::string& content, const std::string& name,
                           std::string* diff_hint = nullptr) {
  fs::path file = golden_dir() / name;
  if (update_golden()) {
    fs::create_directories(file.parent_path());
    write_file(file, content);
    return true;
  }
  std::string expected = read_file(file);
  if (expected == content) return true;
  if (diff_hint) {
    std::size_t i = 0;
    while (i < expected.size() && i < content.size() && expected[i] == content[i]) {
      ++i;
    }
    *diff_hint = "first difference at byte " + std::to_string(i) + ": expected '" +
                 expected.substr(i, 40) + "' got '" + content.substr(i, 40) + "'";
  }
  return false;
}

// ---------------------------------------------------------------------------
// Shared fixtures

inline adaptqa::geo::Gazetteer fixture_gazetteer() {
  using adaptqa::geo::GeoTag;
  return adaptqa::geo::Gazetteer::from_entries({
      {"sydney", GeoTag{"Australia", "Sydney"}},
      {"picton", GeoTag{"Australia", "Picton"}},
      {"new south wales", GeoTag{"Australia", "New South Wales"}},
      {"perth", GeoTag{"Australia", "Perth"}},
      {"australia", GeoTag{"Australia", ""}},
      {"paris", GeoTag{"France", "Paris"}},
      {"france", GeoTag{"France", ""}},
  });
}

inline adaptqa::corpus::DocumentRecord make_doc(std::string id, std::string body,
                                                std::vector<adaptqa::geo::GeoTag> geo = {},
                                                std::string title = "") {
  adaptqa::corpus::DocumentRecord doc;
  doc.doc_id = std::move(id);
  doc.title = title.empty() ? doc.doc_id : std::move(title);
  doc.body = std::move(body);
  doc.geo = std::move(geo);
  return doc;
}

/// Deterministic words for synthetic bodies.
inline std::string synthetic_body(std::size_t words, std::uint64_t seed = 7) {
  static const char* vocab[] = {"rain", "wheat", "soil",  "crop",  "yield",
                                "heat", "frost", "sow",   "water", "season"};
  std::mt19937_64 rng(seed);
  std::string body;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) body += " ";
    body += vocab[rng() % 10];
    body += std::to_string(rng() % 100);
  }
  return body;
}

/// One-line scripted backend.
inline std::shared_ptr<adaptqa::llm::ScriptedBackend> scripted(
    std::vector<adaptqa::llm::ScriptedEntry> entries, std::string fallback = "",
    bool strict = false) {
  return std::make_shared<adaptqa::llm::ScriptedBackend>(std::move(entries),
                                                         std::move(fallback),
                                                         strict);
}

inline adaptqa::llm::ScriptedEntry entry(adaptqa::llm::Purpose purpose,
                                         std::string match, std::string response,
                                         int max_uses = -1) {
  adaptqa::llm::ScriptedEntry e;
  e.purpose = purpose;
  e.match = std::move(match);
  e.response = std::move(response);
  e.max_uses = max_uses;
  return e;
}

}  // namespace testutil

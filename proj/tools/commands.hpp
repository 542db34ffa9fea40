#pragma once

#include <optional>
#include <string>

#include "adaptqa/config.hpp"

namespace adaptqa::cli {

// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct AskOverrides {
  std::optional<double> beta;
  std::optional<double> lambda;
  std::optional<int> k;
  std::optional<int> max_iterations;
  std::optional<std::string> trace_path;
};

int cmd_ingest(const RunConfig& config);
int cmd_ask(const RunConfig& config, const std::string& question,
            const AskOverrides& overrides);
int cmd_calibrate(const RunConfig& config, const std::string& annotations_path,
                  const std::string& scores_path, const std::string& out_path);
int cmd_evaluate(const RunConfig& config, const std::string& answers_path,
                 const std::string& weights_path, const std::string& out_path);
int cmd_fixtures(const std::string& out_dir);

}  // namespace adaptqa::cli

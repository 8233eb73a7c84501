#pragma once

#include <string>

#include "json.hpp"

#include "dce/dataset_io.hpp"
#include "dce/run_config.hpp"

namespace dce {

// File-based pipeline entry points shared by the CLI and the language
// bindings. Every output is written atomically; eval writes the machine
// report at out_path and a human-readable twin next to it, and returns the
// machine report.

nlohmann::json cmd_generate(const GenConfig& cfg, const std::string& out_path);

void cmd_train(const std::string& stage, const std::string& data_path, const RunConfig& rc,
               const std::string& sae_path, const std::string& out_path);

nlohmann::json cmd_eval(const std::string& task, const std::string& data_path,
                        const RunConfig& rc, const std::string& sae_path,
                        const std::string& dce_path, const std::string& fused_path,
                        const std::string& ema_path, double challenge_rate,
                        const std::string& out_path);

}  // namespace dce

#pragma once

#include <string>

#include "dce/baselines.hpp"
#include "dce/customer_model.hpp"
#include "dce/gen_config.hpp"
#include "dce/probe.hpp"
#include "dce/session_autoencoder.hpp"

namespace dce {

// Aggregated knobs for the whole pipeline, read from a "key = value" file
// ('#' starts a comment). Unknown keys are rejected so typos fail loudly.
struct RunConfig {
    GenConfig gen;
    SaeConfig sae;
    DceTrainConfig dce;
    EmaFitConfig ema;
    ProbeConfig probe;
    double challenge_rate = 0.05;
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace dce

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "dce/baselines.hpp"
#include "dce/customer_model.hpp"
#include "dce/data.hpp"
#include "dce/metrics.hpp"
#include "dce/probe.hpp"
#include "dce/session_autoencoder.hpp"

namespace dce {

// Per-session feature rows for one split, chronologically replayed so row
// (customer, i) only uses information available at login i.
struct SessionRows {
    std::vector<const Observation*> obs;
    std::vector<std::int64_t> customer_id;
    std::vector<std::size_t> session_index;  // 1-based within the history
    std::vector<Vec> session_embedding;      // s_i
    std::vector<Vec> customer_embedding;     // c_i
    std::vector<Vec> predicted_embedding;    // s_hat_i

    std::size_t size() const { return obs.size(); }
};

SessionRows build_session_rows(const std::vector<CustomerHistory>& split,
                               const SessionAutoencoder& sae, const DceModel& model);

// ---------------------------------------------------------------------------
// Next-session embedding prediction: mean cosine distance on the common
// prediction set (sessions with at least one preceding session).

struct NextSessionReport {
    std::size_t n_pairs = 0;      // common prediction set size
    std::size_t n_all = 0;        // every session, first included
    double previous = 0.0;
    double average = 0.0;
    double ema = 0.0;
    double ema_alpha = 0.0;
    double model = 0.0;           // recurrent model, common set
    double model_all = 0.0;       // recurrent model, first sessions included
    nlohmann::json to_json() const;
};

NextSessionReport eval_next_session(const std::vector<CustomerHistory>& split,
                                    const SessionAutoencoder& sae, const DceModel& model,
                                    const EmaParams& ema);

// ---------------------------------------------------------------------------
// Frozen-feature probe scenarios share this result shape.

struct ScenarioResult {
    std::string name;
    double auroc = 0.0;            // macro for intent, binary otherwise
    std::vector<double> per_class; // intent only
    std::vector<std::size_t> eval_skipped_classes;
    std::vector<std::size_t> probe_skipped_classes;
    double recall = 0.0;           // fraud only
    std::size_t flagged = 0;
    nlohmann::json to_json() const;
};

struct TaskReport {
    std::string task;
    std::size_t n_train = 0;
    std::size_t n_eval = 0;
    double challenge_rate = 0.0;   // fraud only
    std::vector<ScenarioResult> scenarios;

    const ScenarioResult& scenario(const std::string& name) const;
    nlohmann::json to_json() const;
};

// Session intents, multi-label macro AUROC. Scenarios: context_only,
// dce, dce_plus_context, and fused when a fused-mode model is given.
TaskReport eval_intent_task(const SessionRows& train, const SessionRows& eval,
                            const ProbeConfig& probe_cfg,
                            const SessionRows* train_fused = nullptr,
                            const SessionRows* eval_fused = nullptr);

// Call within six hours of session end. Scenarios: context_only, session,
// session_plus_dce.
TaskReport eval_call_task(const SessionRows& train, const SessionRows& eval,
                          const ProbeConfig& probe_cfg);

// Fraudulent session detection at a fixed challenge rate. Scenarios:
// context_only, context_plus_dce.
TaskReport eval_fraud_task(const SessionRows& train, const SessionRows& eval,
                           const ProbeConfig& probe_cfg, double challenge_rate);

}  // namespace dce

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dce/data.hpp"
#include "dce/layers.hpp"
#include "dce/session_autoencoder.hpp"

namespace dce {

enum class DceMode { FiveStream, FusedVanilla };

std::string to_string(DceMode mode);
DceMode dce_mode_from_string(const std::string& s);

struct DceConfig {
    std::size_t sess_dim = 32;    // session embedding width d (must match the autoencoder)
    std::size_t ctx_dim = kContextDim;
    std::size_t hidden = 32;      // per-stream LSTM hidden width
    std::size_t mlp_hidden = 32;
    std::size_t stream_out = 16;  // per-stream MLP output width o
    std::size_t cust_dim = 32;    // customer embedding width d_c
    std::size_t day_dim = 4;
    std::size_t week_dim = 4;
    std::size_t month_dim = 4;
    DceMode mode = DceMode::FiveStream;
};

// Inputs for advancing the model by one session: everything known at the
// moment of login i.
struct SessionStepFeatures {
    Vec prev_embedding;          // s_{i-1}; zero vector for the first session
    double delta_seconds = 0.0;  // t_i - t_{i-1}; sentinel 86400 for the first session
    int day_index = 0;           // 0..6
    int week_index = 0;          // 0..4
    int month_index = 0;         // 0..11
    FinancialContext context;    // raw f_i; standardized inside the model
};

inline constexpr double kFirstSessionDeltaSeconds = 86400.0;

// Recurrent state: (h, c) for each of the five streams. Fused-vanilla mode
// uses only the first slot.
struct DceState {
    std::vector<LstmState> streams;
};

struct DceStepCache {
    std::vector<LstmStepCache> lstm;
    std::vector<MlpCache> mlp;
    Vec fusion_in;
    Vec customer;
    int day_index = 0, week_index = 0, month_index = 0;
};

struct DceStepOutput {
    DceState state;
    Vec customer;   // c_i
    Vec predicted;  // s_hat_i
};

// Per-stream gradient carry for backpropagation through time.
struct DceStateGrad {
    std::vector<Vec> dh;
    std::vector<Vec> dc;
};

// Five parallel LSTM streams (session sequence, day of week, week of month,
// month of year, financial context), each followed by an MLP; stream outputs
// are fused by a fully connected layer into the customer embedding c_i, and a
// projection head maps c_i to the predicted next-session embedding s_hat_i.
//
// Fused-vanilla mode is the single-LSTM ablation: one LSTM over the
// concatenation of all stream inputs, one MLP producing c_i directly, and the
// same projection head. Both modes expose identical step/unroll contracts.
class DceModel {
public:
    DceModel() = default;
    explicit DceModel(const DceConfig& cfg);  // all parameters zero

    void init_params(Rng& rng);

    const DceConfig& config() const { return cfg_; }
    std::size_t n_streams() const { return cfg_.mode == DceMode::FiveStream ? 5 : 1; }

    void set_context_stats(Vec mean, Vec stdev);
    const Vec& context_mean() const { return ctx_mean_; }
    const Vec& context_std() const { return ctx_std_; }

    DceState init_state() const;

    // Pure forward step; fills cache when provided.
    DceStepOutput step(const DceState& state, const SessionStepFeatures& feats,
                       DceStepCache* cache = nullptr) const;

    // Accumulates parameter gradients for one step given dL/ds_hat. `carry`
    // holds dL/d(state out) on entry and dL/d(state in) on exit.
    void step_backward(const DceStepCache& cache, const Vec& d_predicted, DceStateGrad& carry);

    DceStateGrad zero_state_grad() const;

    std::vector<Param*> params();
    std::vector<const Param*> params() const;

    void save(const std::string& path, const nlohmann::json& train_config_echo) const;
    static DceModel load(const std::string& path);

private:
    Vec standardize(const FinancialContext& ctx) const;
    Vec stream_input(std::size_t k, const SessionStepFeatures& feats) const;
    Vec fused_input(const SessionStepFeatures& feats) const;

    DceConfig cfg_;
    std::vector<LstmCell> lstm_;    // 5 streams, or 1 in fused mode
    std::vector<Mlp> mlp_;          // parallel to lstm_
    Embedding emb_day_, emb_week_, emb_month_;
    Linear fusion_;                 // 5o -> d_c (absent in fused mode)
    Linear proj_;                   // d_c -> d
    Vec ctx_mean_, ctx_std_;
};

// Builds the step features for observation i (0-based) of a history, given
// the per-session embeddings of that history.
SessionStepFeatures make_step_features(const CustomerHistory& history, std::size_t i,
                                       const std::vector<Vec>& session_embeddings,
                                       std::size_t sess_dim);

// Sum of cosine distances between predicted and actual session embeddings
// over the whole history (first session included; its inputs use the zero
// embedding and the sentinel gap). Returns (loss sum, prediction count).
std::pair<double, std::size_t> unroll_loss(const DceModel& model, const CustomerHistory& history,
                                           const std::vector<Vec>& session_embeddings);

struct CustomerEmbeddingRow {
    std::int64_t customer_id = 0;
    std::size_t session_index = 0;  // 1-based i
    Vec customer;                   // c_i
    Vec predicted;                  // s_hat_i
};

// Chronological replay of each history; row (c, i) uses only information
// available at login time t_i.
std::vector<CustomerEmbeddingRow> embed_customers(const DceModel& model,
                                                  const std::vector<const CustomerHistory*>& histories,
                                                  const SessionAutoencoder& sae);

struct DceTrainConfig {
    DceConfig model;
    // Tuned on the bundled generator at 2k customers; more epochs start to
    // oscillate on the next-session objective rather than improve it.
    std::size_t epochs = 12;
    double lr = 3e-3;
    std::size_t batch_customers = 16;
    std::size_t max_unroll = 64;  // truncated-BPTT window length
    std::uint64_t seed = 2;
};

// Self-supervised training: minimizes the mean cosine distance between
// predicted and actual session embeddings over the train split. Session
// embeddings are precomputed with the (frozen) autoencoder; context
// standardization statistics come from the train split and are stored on the
// model. Deterministic given cfg.seed.
std::pair<DceModel, std::vector<double>> train_dce(const Dataset& dataset,
                                                   const SessionAutoencoder& sae,
                                                   const DceTrainConfig& cfg);

}  // namespace dce

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dce/data.hpp"
#include "dce/layers.hpp"
#include "dce/tensor.hpp"

namespace dce {

struct SaeConfig {
    std::size_t embed_dim = 32;   // session embedding width d
    std::size_t token_dim = 16;   // event token embedding width
    std::size_t max_len = 64;     // sessions truncated (not split) here
    // Defaults tuned on the bundled generator at 2k customers: fewer epochs or
    // a smaller step leave embeddings near-collapsed (watch the fitted-EMA
    // training distance as a cheap collapse probe).
    std::size_t epochs = 18;
    double lr = 1e-2;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
};

// Sequence-to-sequence LSTM autoencoder over click-stream event sequences.
// The encoder's final hidden state is the session embedding; the decoder is
// teacher-forced from a reserved start token and reads the embedding as its
// initial hidden state (cell state starts at zero).
class SessionAutoencoder {
public:
    SessionAutoencoder() = default;
    // All parameters zero; call init_params for training initialization.
    SessionAutoencoder(std::size_t vocab_size, const SaeConfig& cfg);

    void init_params(Rng& rng);

    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t embed_dim() const { return cfg_.embed_dim; }
    const SaeConfig& config() const { return cfg_; }

    // Final encoder hidden state over the (truncated) event sequence.
    Vec encode(const Session& session) const;

    // Teacher-forced decoder scores, one row of m logits per target position.
    Tensor reconstruct_logits(const Vec& embedding, const Session& target) const;

    // Mean token cross-entropy of reconstructing `session` from its own
    // embedding.
    double reconstruction_loss(const Session& session) const;
    // Fraction of positions whose argmax logit equals the target token.
    double token_accuracy(const Session& session) const;

    // Runs encoder+decoder forward and backward, accumulating parameter
    // gradients scaled by `weight`. Returns (summed token CE, token count).
    std::pair<double, std::size_t> accumulate_gradients(const Session& session, double weight);

    std::vector<Param*> params();
    std::vector<const Param*> params() const;

    void save(const std::string& path) const;
    static SessionAutoencoder load(const std::string& path);

private:
    std::vector<int> token_ids(const Session& session) const;

    std::size_t vocab_size_ = 0;
    SaeConfig cfg_;
    Embedding tok_emb_;    // (m, k)
    Param start_emb_;      // (k), decoder start token
    LstmCell encoder_;
    LstmCell decoder_;
    Linear out_proj_;      // (m, d)
};

// Trains on the corpus by minimizing mean token cross-entropy. Returns the
// model and per-epoch mean loss. Deterministic given cfg.seed.
std::pair<SessionAutoencoder, std::vector<double>> train_autoencoder(
    const std::vector<const Session*>& corpus, std::size_t vocab_size, const SaeConfig& cfg);

// encode() over a list; element i corresponds to sessions[i]. Errors carry
// the offending session index.
std::vector<Vec> embed_corpus(const SessionAutoencoder& model,
                              const std::vector<const Session*>& sessions);

}  // namespace dce

#include "dce/session_autoencoder.hpp"

#include <cmath>

#include "dce/checkpoint.hpp"
#include "dce/errors.hpp"
#include "dce/optim.hpp"
#include "dce/rng.hpp"

namespace dce {

SessionAutoencoder::SessionAutoencoder(std::size_t vocab_size, const SaeConfig& cfg)
    : vocab_size_(vocab_size),
      cfg_(cfg),
      tok_emb_("tok_emb", vocab_size, cfg.token_dim),
      start_emb_("start_emb", Tensor({cfg.token_dim})),
      encoder_("enc", cfg.token_dim, cfg.embed_dim),
      decoder_("dec", cfg.token_dim, cfg.embed_dim),
      out_proj_("out", vocab_size, cfg.embed_dim) {
    if (vocab_size == 0) throw ConfigError("autoencoder: vocabulary must be non-empty");
}

void SessionAutoencoder::init_params(Rng& rng) {
    tok_emb_.init(rng);
    for (double& v : start_emb_.value.data) v = rng.uniform(-0.1, 0.1);
    encoder_.init(rng);
    decoder_.init(rng);
    out_proj_.init(rng);
}

std::vector<int> SessionAutoencoder::token_ids(const Session& session) const {
    if (session.events.empty()) throw EmptyInputError("encode: session has no events");
    std::vector<int> ids;
    const std::size_t n = std::min(session.events.size(), cfg_.max_len);
    ids.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int id = session.events[k].id;
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_)
            throw VocabError("encode: event id " + std::to_string(id) + " outside vocabulary");
        ids.push_back(id);
    }
    return ids;
}

Vec SessionAutoencoder::encode(const Session& session) const {
    const std::vector<int> ids = token_ids(session);
    LstmState state = encoder_.zero_state();
    for (int id : ids) state = encoder_.step(tok_emb_.forward(static_cast<std::size_t>(id)), state);
    return state.h;
}

Tensor SessionAutoencoder::reconstruct_logits(const Vec& embedding, const Session& target) const {
    // token_ids truncates to max_len, mirroring encode().
    const std::vector<int> ids = token_ids(target);
    if (embedding.size() != cfg_.embed_dim)
        throw DimensionError("reconstruct: embedding width mismatch");

    Tensor logits({ids.size(), vocab_size_});
    LstmState state{embedding, Vec(cfg_.embed_dim, 0.0)};
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const Vec x = t == 0 ? Vec(start_emb_.value.data)
                             : tok_emb_.forward(static_cast<std::size_t>(ids[t - 1]));
        state = decoder_.step(x, state);
        const Vec row = out_proj_.forward(state.h);
        for (std::size_t j = 0; j < vocab_size_; ++j) logits.at(t, j) = row[j];
    }
    return logits;
}

double SessionAutoencoder::reconstruction_loss(const Session& session) const {
    const std::vector<int> ids = token_ids(session);
    const Tensor logits = reconstruct_logits(encode(session), session);
    double total = 0.0;
    for (std::size_t t = 0; t < ids.size(); ++t) {
        std::span<const double> row(logits.data.data() + t * vocab_size_, vocab_size_);
        total += softmax_cross_entropy(row, static_cast<std::size_t>(ids[t]));
    }
    return total / static_cast<double>(ids.size());
}

double SessionAutoencoder::token_accuracy(const Session& session) const {
    const std::vector<int> ids = token_ids(session);
    const Tensor logits = reconstruct_logits(encode(session), session);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < ids.size(); ++t) {
        std::span<const double> row(logits.data.data() + t * vocab_size_, vocab_size_);
        if (argmax(row) == static_cast<std::size_t>(ids[t])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(ids.size());
}

std::pair<double, std::size_t> SessionAutoencoder::accumulate_gradients(const Session& session,
                                                                        double weight) {
    const std::vector<int> ids = token_ids(session);
    const std::size_t steps = ids.size();
    const std::size_t d = cfg_.embed_dim;

    // Encoder forward with caches.
    std::vector<LstmStepCache> enc_caches(steps);
    LstmState enc_state = encoder_.zero_state();
    for (std::size_t t = 0; t < steps; ++t)
        enc_state =
            encoder_.step(tok_emb_.forward(static_cast<std::size_t>(ids[t])), enc_state, &enc_caches[t]);

    // Decoder forward with caches; h0 = embedding, c0 = 0.
    std::vector<LstmStepCache> dec_caches(steps);
    std::vector<Vec> dec_hidden(steps);
    LstmState dec_state{enc_state.h, Vec(d, 0.0)};
    double total_ce = 0.0;
    std::vector<Vec> dlogits(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const Vec x = t == 0 ? Vec(start_emb_.value.data)
                             : tok_emb_.forward(static_cast<std::size_t>(ids[t - 1]));
        dec_state = decoder_.step(x, dec_state, &dec_caches[t]);
        dec_hidden[t] = dec_state.h;
        const Vec logits = out_proj_.forward(dec_state.h);
        total_ce += softmax_cross_entropy(logits, static_cast<std::size_t>(ids[t]));
        softmax_cross_entropy_backward(logits, static_cast<std::size_t>(ids[t]), weight,
                                       &dlogits[t]);
    }

    // Decoder backward.
    Vec dh(d, 0.0), dc(d, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        Vec dh_step;
        out_proj_.backward(dec_hidden[t], dlogits[t], &dh_step);
        for (std::size_t j = 0; j < d; ++j) dh[j] += dh_step[j];

        Vec dx, dh_prev(d, 0.0), dc_prev(d, 0.0);
        decoder_.backward(dec_caches[t], dh, dc, &dx, &dh_prev, &dc_prev);
        if (t == 0) {
            for (std::size_t j = 0; j < cfg_.token_dim; ++j) start_emb_.grad.data[j] += dx[j];
        } else {
            tok_emb_.backward(static_cast<std::size_t>(ids[t - 1]), dx);
        }
        dh = std::move(dh_prev);
        dc = std::move(dc_prev);
    }

    // The decoder's initial hidden state is the embedding; its initial cell
    // state is a constant zero, so only dh flows into the encoder.
    Vec enc_dh = std::move(dh);
    Vec enc_dc(d, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        Vec dx, dh_prev(d, 0.0), dc_prev(d, 0.0);
        encoder_.backward(enc_caches[t], enc_dh, enc_dc, &dx, &dh_prev, &dc_prev);
        tok_emb_.backward(static_cast<std::size_t>(ids[t]), dx);
        enc_dh = std::move(dh_prev);
        enc_dc = std::move(dc_prev);
    }

    return {total_ce, steps};
}

std::vector<Param*> SessionAutoencoder::params() {
    std::vector<Param*> out;
    tok_emb_.collect(out);
    out.push_back(&start_emb_);
    encoder_.collect(out);
    decoder_.collect(out);
    out_proj_.collect(out);
    return out;
}

std::vector<const Param*> SessionAutoencoder::params() const {
    std::vector<const Param*> out;
    for (Param* p : const_cast<SessionAutoencoder*>(this)->params()) out.push_back(p);
    return out;
}

void SessionAutoencoder::save(const std::string& path) const {
    nlohmann::json manifest;
    manifest["model_kind"] = "sae";
    manifest["dims"] = {{"vocab_size", vocab_size_},
                        {"embed_dim", cfg_.embed_dim},
                        {"token_dim", cfg_.token_dim},
                        {"max_len", cfg_.max_len}};
    manifest["train_config"] = {{"epochs", cfg_.epochs},
                                {"lr", cfg_.lr},
                                {"batch_size", cfg_.batch_size},
                                {"seed", cfg_.seed}};
    save_checkpoint(path, manifest, params());
}

SessionAutoencoder SessionAutoencoder::load(const std::string& path) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.manifest.value("model_kind", "") != "sae")
        throw IoError("checkpoint is not a session autoencoder: " + path);
    const auto& dims = ckpt.manifest.at("dims");
    SaeConfig cfg;
    cfg.embed_dim = dims.at("embed_dim").get<std::size_t>();
    cfg.token_dim = dims.at("token_dim").get<std::size_t>();
    cfg.max_len = dims.at("max_len").get<std::size_t>();
    const auto& tc = ckpt.manifest.at("train_config");
    cfg.epochs = tc.at("epochs").get<std::size_t>();
    cfg.lr = tc.at("lr").get<double>();
    cfg.batch_size = tc.at("batch_size").get<std::size_t>();
    cfg.seed = tc.at("seed").get<std::uint64_t>();

    SessionAutoencoder model(dims.at("vocab_size").get<std::size_t>(), cfg);
    restore_params(ckpt, model.params());
    return model;
}

std::pair<SessionAutoencoder, std::vector<double>> train_autoencoder(
    const std::vector<const Session*>& corpus, std::size_t vocab_size, const SaeConfig& cfg) {
    if (corpus.empty()) throw ConfigError("autoencoder: training corpus is empty");
    if (cfg.epochs == 0 || cfg.batch_size == 0)
        throw ConfigError("autoencoder: epochs and batch size must be positive");

    SessionAutoencoder model(vocab_size, cfg);
    Rng rng(cfg.seed);
    model.init_params(rng);

    std::vector<Param*> params = model.params();
    AdamState adam = AdamState::init_for(params);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> loss_history;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_ce = 0.0;
        std::size_t epoch_tokens = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::size_t batch_tokens = 0;
            for (std::size_t b = start; b < end; ++b)
                batch_tokens += std::min(corpus[order[b]]->events.size(), cfg.max_len);

            zero_grads(params);
            const double weight = 1.0 / static_cast<double>(batch_tokens);
            for (std::size_t b = start; b < end; ++b) {
                auto [ce, tokens] = model.accumulate_gradients(*corpus[order[b]], weight);
                epoch_ce += ce;
                epoch_tokens += tokens;
            }
            clip_global_norm(params, 5.0);
            adam_step(params, adam, adam_cfg);
        }
        const double mean_loss = epoch_ce / static_cast<double>(epoch_tokens);
        if (!std::isfinite(mean_loss))
            throw NumericError("autoencoder: non-finite loss at epoch " + std::to_string(epoch + 1));
        loss_history.push_back(mean_loss);
    }
    return {std::move(model), std::move(loss_history)};
}

std::vector<Vec> embed_corpus(const SessionAutoencoder& model,
                              const std::vector<const Session*>& sessions) {
    std::vector<Vec> out;
    out.reserve(sessions.size());
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        try {
            out.push_back(model.encode(*sessions[i]));
        } catch (const EmptyInputError& e) {
            throw EmptyInputError("embed_corpus: session " + std::to_string(i) + ": " + e.what());
        } catch (const VocabError& e) {
            throw VocabError("embed_corpus: session " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace dce

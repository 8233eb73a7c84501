#include "dce/customer_model.hpp"

#include <cmath>

#include "dce/checkpoint.hpp"
#include "dce/errors.hpp"
#include "dce/optim.hpp"

namespace dce {

namespace {

constexpr std::size_t kStreamSession = 0;
constexpr std::size_t kStreamDay = 1;
constexpr std::size_t kStreamWeek = 2;
constexpr std::size_t kStreamMonth = 3;
constexpr std::size_t kStreamContext = 4;

double log_gap(double delta_seconds) { return std::log1p(delta_seconds); }

}  // namespace

std::string to_string(DceMode mode) {
    return mode == DceMode::FiveStream ? "five_stream" : "fused_vanilla";
}

DceMode dce_mode_from_string(const std::string& s) {
    if (s == "five_stream") return DceMode::FiveStream;
    if (s == "fused_vanilla") return DceMode::FusedVanilla;
    throw ConfigError("unknown model mode: " + s);
}

DceModel::DceModel(const DceConfig& cfg)
    : cfg_(cfg),
      emb_day_("emb_day", 7, cfg.day_dim),
      emb_week_("emb_week", 5, cfg.week_dim),
      emb_month_("emb_month", 12, cfg.month_dim),
      ctx_mean_(cfg.ctx_dim, 0.0),
      ctx_std_(cfg.ctx_dim, 1.0) {
    if (cfg.mode == DceMode::FiveStream) {
        lstm_.emplace_back("lstm_s", cfg.sess_dim + 1, cfg.hidden);
        lstm_.emplace_back("lstm_d", cfg.day_dim, cfg.hidden);
        lstm_.emplace_back("lstm_w", cfg.week_dim, cfg.hidden);
        lstm_.emplace_back("lstm_m", cfg.month_dim, cfg.hidden);
        lstm_.emplace_back("lstm_f", cfg.ctx_dim, cfg.hidden);
        for (const char* name : {"mlp_s", "mlp_d", "mlp_w", "mlp_m", "mlp_f"})
            mlp_.emplace_back(name, cfg.hidden, cfg.mlp_hidden, cfg.stream_out);
        fusion_ = Linear("fusion", cfg.cust_dim, 5 * cfg.stream_out);
    } else {
        const std::size_t in =
            cfg.sess_dim + 1 + cfg.day_dim + cfg.week_dim + cfg.month_dim + cfg.ctx_dim;
        lstm_.emplace_back("lstm_fused", in, cfg.hidden);
        // One MLP producing the customer embedding directly.
        mlp_.emplace_back("mlp_fused", cfg.hidden, cfg.mlp_hidden, cfg.cust_dim);
    }
    proj_ = Linear("proj", cfg.sess_dim, cfg.cust_dim);
}

void DceModel::init_params(Rng& rng) {
    for (auto& cell : lstm_) cell.init(rng);
    for (auto& m : mlp_) m.init(rng);
    emb_day_.init(rng);
    emb_week_.init(rng);
    emb_month_.init(rng);
    if (cfg_.mode == DceMode::FiveStream) fusion_.init(rng);
    proj_.init(rng);
}

void DceModel::set_context_stats(Vec mean, Vec stdev) {
    if (mean.size() != cfg_.ctx_dim || stdev.size() != cfg_.ctx_dim)
        throw DimensionError("context stats width mismatch");
    for (double s : stdev)
        if (!(s > 0.0)) throw NumericError("context std must be positive");
    ctx_mean_ = std::move(mean);
    ctx_std_ = std::move(stdev);
}

DceState DceModel::init_state() const {
    DceState state;
    state.streams.reserve(lstm_.size());
    for (const auto& cell : lstm_) state.streams.push_back(cell.zero_state());
    return state;
}

Vec DceModel::standardize(const FinancialContext& ctx) const {
    if (ctx.size() != cfg_.ctx_dim) throw DimensionError("context width mismatch");
    Vec out(ctx.size());
    for (std::size_t j = 0; j < ctx.size(); ++j) out[j] = (ctx[j] - ctx_mean_[j]) / ctx_std_[j];
    return out;
}

Vec DceModel::stream_input(std::size_t k, const SessionStepFeatures& feats) const {
    switch (k) {
        case kStreamSession: {
            if (feats.prev_embedding.size() != cfg_.sess_dim)
                throw DimensionError("previous session embedding width mismatch");
            Vec x = feats.prev_embedding;
            x.push_back(log_gap(feats.delta_seconds));
            return x;
        }
        case kStreamDay:
            return emb_day_.forward(static_cast<std::size_t>(feats.day_index));
        case kStreamWeek:
            return emb_week_.forward(static_cast<std::size_t>(feats.week_index));
        case kStreamMonth:
            return emb_month_.forward(static_cast<std::size_t>(feats.month_index));
        case kStreamContext:
            return standardize(feats.context);
        default:
            throw IndexError("bad stream index");
    }
}

Vec DceModel::fused_input(const SessionStepFeatures& feats) const {
    if (feats.prev_embedding.size() != cfg_.sess_dim)
        throw DimensionError("previous session embedding width mismatch");
    Vec x = feats.prev_embedding;
    x.push_back(log_gap(feats.delta_seconds));
    for (double v : emb_day_.forward(static_cast<std::size_t>(feats.day_index))) x.push_back(v);
    for (double v : emb_week_.forward(static_cast<std::size_t>(feats.week_index))) x.push_back(v);
    for (double v : emb_month_.forward(static_cast<std::size_t>(feats.month_index))) x.push_back(v);
    for (double v : standardize(feats.context)) x.push_back(v);
    return x;
}

DceStepOutput DceModel::step(const DceState& state, const SessionStepFeatures& feats,
                             DceStepCache* cache) const {
    if (state.streams.size() != lstm_.size()) throw DimensionError("state/stream count mismatch");
    if (feats.day_index < 0 || feats.day_index > 6) throw IndexError("day index out of range");
    if (feats.week_index < 0 || feats.week_index > 4) throw IndexError("week index out of range");
    if (feats.month_index < 0 || feats.month_index > 11)
        throw IndexError("month index out of range");

    const std::size_t n = lstm_.size();
    if (cache) {
        cache->lstm.assign(n, {});
        cache->mlp.assign(n, {});
        cache->day_index = feats.day_index;
        cache->week_index = feats.week_index;
        cache->month_index = feats.month_index;
    }

    DceStepOutput out;
    out.state.streams.resize(n);

    if (cfg_.mode == DceMode::FiveStream) {
        Vec fusion_in;
        fusion_in.reserve(5 * cfg_.stream_out);
        for (std::size_t k = 0; k < n; ++k) {
            const Vec x = stream_input(k, feats);
            out.state.streams[k] =
                lstm_[k].step(x, state.streams[k], cache ? &cache->lstm[k] : nullptr);
            const Vec o =
                mlp_[k].forward(out.state.streams[k].h, cache ? &cache->mlp[k] : nullptr);
            fusion_in.insert(fusion_in.end(), o.begin(), o.end());
        }
        out.customer = fusion_.forward(fusion_in);
        if (cache) cache->fusion_in = std::move(fusion_in);
    } else {
        const Vec x = fused_input(feats);
        out.state.streams[0] = lstm_[0].step(x, state.streams[0], cache ? &cache->lstm[0] : nullptr);
        out.customer = mlp_[0].forward(out.state.streams[0].h, cache ? &cache->mlp[0] : nullptr);
    }

    out.predicted = proj_.forward(out.customer);
    if (cache) {
        cache->customer = out.customer;
    }
    return out;
}

DceStateGrad DceModel::zero_state_grad() const {
    DceStateGrad g;
    g.dh.assign(lstm_.size(), Vec(cfg_.hidden, 0.0));
    g.dc.assign(lstm_.size(), Vec(cfg_.hidden, 0.0));
    return g;
}

void DceModel::step_backward(const DceStepCache& cache, const Vec& d_predicted,
                             DceStateGrad& carry) {
    Vec d_customer;
    proj_.backward(cache.customer, d_predicted, &d_customer);

    if (cfg_.mode == DceMode::FiveStream) {
        Vec d_fusion_in;
        fusion_.backward(cache.fusion_in, d_customer, &d_fusion_in);
        for (std::size_t k = 0; k < 5; ++k) {
            std::span<const double> d_o(d_fusion_in.data() + k * cfg_.stream_out,
                                        cfg_.stream_out);
            Vec dh_extra;
            mlp_[k].backward(cache.mlp[k], d_o, &dh_extra);
            Vec dh = carry.dh[k];
            for (std::size_t j = 0; j < dh.size(); ++j) dh[j] += dh_extra[j];

            Vec dx, dh_prev(cfg_.hidden, 0.0), dc_prev(cfg_.hidden, 0.0);
            lstm_[k].backward(cache.lstm[k], dh, carry.dc[k], &dx, &dh_prev, &dc_prev);
            carry.dh[k] = std::move(dh_prev);
            carry.dc[k] = std::move(dc_prev);

            // Input-side gradients: calendar embeddings are trainable; the
            // previous session embedding, gap and raw context are constants.
            if (k == kStreamDay)
                emb_day_.backward(static_cast<std::size_t>(cache.day_index), dx);
            else if (k == kStreamWeek)
                emb_week_.backward(static_cast<std::size_t>(cache.week_index), dx);
            else if (k == kStreamMonth)
                emb_month_.backward(static_cast<std::size_t>(cache.month_index), dx);
        }
    } else {
        Vec dh_extra;
        mlp_[0].backward(cache.mlp[0], d_customer, &dh_extra);
        Vec dh = carry.dh[0];
        for (std::size_t j = 0; j < dh.size(); ++j) dh[j] += dh_extra[j];

        Vec dx, dh_prev(cfg_.hidden, 0.0), dc_prev(cfg_.hidden, 0.0);
        lstm_[0].backward(cache.lstm[0], dh, carry.dc[0], &dx, &dh_prev, &dc_prev);
        carry.dh[0] = std::move(dh_prev);
        carry.dc[0] = std::move(dc_prev);

        std::size_t off = cfg_.sess_dim + 1;
        emb_day_.backward(static_cast<std::size_t>(cache.day_index),
                          std::span<const double>(dx.data() + off, cfg_.day_dim));
        off += cfg_.day_dim;
        emb_week_.backward(static_cast<std::size_t>(cache.week_index),
                           std::span<const double>(dx.data() + off, cfg_.week_dim));
        off += cfg_.week_dim;
        emb_month_.backward(static_cast<std::size_t>(cache.month_index),
                            std::span<const double>(dx.data() + off, cfg_.month_dim));
    }
}

std::vector<Param*> DceModel::params() {
    std::vector<Param*> out;
    for (auto& cell : lstm_) cell.collect(out);
    for (auto& m : mlp_) m.collect(out);
    emb_day_.collect(out);
    emb_week_.collect(out);
    emb_month_.collect(out);
    if (cfg_.mode == DceMode::FiveStream) fusion_.collect(out);
    proj_.collect(out);
    return out;
}

std::vector<const Param*> DceModel::params() const {
    std::vector<const Param*> out;
    for (Param* p : const_cast<DceModel*>(this)->params()) out.push_back(p);
    return out;
}

void DceModel::save(const std::string& path, const nlohmann::json& train_config_echo) const {
    nlohmann::json manifest;
    manifest["model_kind"] = "dce";
    manifest["mode"] = to_string(cfg_.mode);
    manifest["dims"] = {{"sess_dim", cfg_.sess_dim},   {"ctx_dim", cfg_.ctx_dim},
                        {"hidden", cfg_.hidden},       {"mlp_hidden", cfg_.mlp_hidden},
                        {"stream_out", cfg_.stream_out}, {"cust_dim", cfg_.cust_dim},
                        {"day_dim", cfg_.day_dim},     {"week_dim", cfg_.week_dim},
                        {"month_dim", cfg_.month_dim}};
    manifest["context_stats"] = {{"mean", ctx_mean_}, {"std", ctx_std_}};
    manifest["train_config"] = train_config_echo;
    save_checkpoint(path, manifest, params());
}

DceModel DceModel::load(const std::string& path) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.manifest.value("model_kind", "") != "dce")
        throw IoError("checkpoint is not a customer model: " + path);
    const auto& dims = ckpt.manifest.at("dims");
    DceConfig cfg;
    cfg.sess_dim = dims.at("sess_dim").get<std::size_t>();
    cfg.ctx_dim = dims.at("ctx_dim").get<std::size_t>();
    cfg.hidden = dims.at("hidden").get<std::size_t>();
    cfg.mlp_hidden = dims.at("mlp_hidden").get<std::size_t>();
    cfg.stream_out = dims.at("stream_out").get<std::size_t>();
    cfg.cust_dim = dims.at("cust_dim").get<std::size_t>();
    cfg.day_dim = dims.at("day_dim").get<std::size_t>();
    cfg.week_dim = dims.at("week_dim").get<std::size_t>();
    cfg.month_dim = dims.at("month_dim").get<std::size_t>();
    cfg.mode = dce_mode_from_string(ckpt.manifest.at("mode").get<std::string>());

    DceModel model(cfg);
    restore_params(ckpt, model.params());
    const auto& stats = ckpt.manifest.at("context_stats");
    model.set_context_stats(stats.at("mean").get<Vec>(), stats.at("std").get<Vec>());
    return model;
}

SessionStepFeatures make_step_features(const CustomerHistory& history, std::size_t i,
                                       const std::vector<Vec>& session_embeddings,
                                       std::size_t sess_dim) {
    if (i >= history.size()) throw IndexError("step features: session index out of range");
    if (session_embeddings.size() != history.size())
        throw AlignmentError("step features: embeddings not aligned with sessions");

    const Session& s = history.observations[i].session;
    SessionStepFeatures feats;
    if (i == 0) {
        feats.prev_embedding.assign(sess_dim, 0.0);
        feats.delta_seconds = kFirstSessionDeltaSeconds;
    } else {
        feats.prev_embedding = session_embeddings[i - 1];
        feats.delta_seconds =
            static_cast<double>(s.t_login - history.observations[i - 1].session.t_login);
    }
    const CalendarFields cal = calendar_from_epoch(s.t_login);
    feats.day_index = cal.day_of_week;
    feats.week_index = cal.week_of_month;
    feats.month_index = cal.month;
    feats.context = history.observations[i].context;
    return feats;
}

std::pair<double, std::size_t> unroll_loss(const DceModel& model, const CustomerHistory& history,
                                           const std::vector<Vec>& session_embeddings) {
    if (session_embeddings.size() != history.size())
        throw AlignmentError("unroll: embeddings not aligned with sessions");
    DceState state = model.init_state();
    double total = 0.0;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const SessionStepFeatures feats =
            make_step_features(history, i, session_embeddings, model.config().sess_dim);
        DceStepOutput out = model.step(state, feats);
        total += cosine_distance(out.predicted, session_embeddings[i]);
        state = std::move(out.state);
    }
    return {total, history.size()};
}

std::vector<CustomerEmbeddingRow> embed_customers(
    const DceModel& model, const std::vector<const CustomerHistory*>& histories,
    const SessionAutoencoder& sae) {
    std::vector<CustomerEmbeddingRow> rows;
    for (const CustomerHistory* h : histories) {
        std::vector<const Session*> sessions;
        sessions.reserve(h->size());
        for (const auto& obs : h->observations) sessions.push_back(&obs.session);
        const std::vector<Vec> embs = embed_corpus(sae, sessions);

        DceState state = model.init_state();
        for (std::size_t i = 0; i < h->size(); ++i) {
            const SessionStepFeatures feats =
                make_step_features(*h, i, embs, model.config().sess_dim);
            DceStepOutput out = model.step(state, feats);
            rows.push_back({h->customer_id, i + 1, std::move(out.customer),
                            std::move(out.predicted)});
            state = std::move(out.state);
        }
    }
    return rows;
}

namespace {

// Forward (and optionally backward) over observations [begin, end) of one
// history. State flows across windows; gradients stop at window boundaries.
std::pair<double, std::size_t> unroll_window(DceModel& model, const CustomerHistory& history,
                                             const std::vector<Vec>& session_embeddings,
                                             std::size_t begin, std::size_t end, DceState& state,
                                             bool with_grad, double grad_weight) {
    const std::size_t steps = end - begin;
    std::vector<DceStepCache> caches(with_grad ? steps : 0);
    std::vector<Vec> predictions(steps);

    double loss = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const SessionStepFeatures feats =
            make_step_features(history, i, session_embeddings, model.config().sess_dim);
        DceStepOutput out = model.step(state, feats, with_grad ? &caches[i - begin] : nullptr);
        loss += cosine_distance(out.predicted, session_embeddings[i]);
        predictions[i - begin] = std::move(out.predicted);
        state = std::move(out.state);
    }

    if (with_grad) {
        DceStateGrad carry = model.zero_state_grad();
        for (std::size_t k = steps; k-- > 0;) {
            Vec d_pred(model.config().sess_dim, 0.0);
            cosine_distance_backward(predictions[k], session_embeddings[begin + k], grad_weight,
                                     &d_pred, nullptr);
            model.step_backward(caches[k], d_pred, carry);
        }
    }
    return {loss, steps};
}

}  // namespace

std::pair<DceModel, std::vector<double>> train_dce(const Dataset& dataset,
                                                   const SessionAutoencoder& sae,
                                                   const DceTrainConfig& cfg) {
    if (dataset.train.empty()) throw ConfigError("train_dce: no training customers");
    if (cfg.model.sess_dim != sae.embed_dim())
        throw DimensionError("train_dce: model sess_dim does not match autoencoder embedding");
    if (cfg.epochs == 0 || cfg.batch_customers == 0 || cfg.max_unroll == 0)
        throw ConfigError("train_dce: epochs, batch and window must be positive");

    DceModel model(cfg.model);
    Rng rng(cfg.seed);
    model.init_params(rng);

    // Context standardization statistics from the train split.
    {
        Vec mean(cfg.model.ctx_dim, 0.0), var(cfg.model.ctx_dim, 0.0);
        std::size_t n = 0;
        for (const auto& h : dataset.train)
            for (const auto& obs : h.observations) {
                if (obs.context.size() != cfg.model.ctx_dim)
                    throw DimensionError("train_dce: context width mismatch");
                ++n;
                for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += obs.context[j];
            }
        if (n == 0) throw ConfigError("train_dce: train split has no sessions");
        for (double& v : mean) v /= static_cast<double>(n);
        for (const auto& h : dataset.train)
            for (const auto& obs : h.observations)
                for (std::size_t j = 0; j < var.size(); ++j) {
                    const double d = obs.context[j] - mean[j];
                    var[j] += d * d;
                }
        Vec stdev(cfg.model.ctx_dim);
        for (std::size_t j = 0; j < stdev.size(); ++j)
            stdev[j] = std::max(std::sqrt(var[j] / static_cast<double>(n)), 1e-6);
        model.set_context_stats(std::move(mean), std::move(stdev));
    }

    // Precompute session embeddings per train history with the frozen
    // autoencoder.
    std::vector<std::vector<Vec>> embeddings(dataset.train.size());
    for (std::size_t c = 0; c < dataset.train.size(); ++c) {
        std::vector<const Session*> sessions;
        for (const auto& obs : dataset.train[c].observations) sessions.push_back(&obs.session);
        embeddings[c] = embed_corpus(sae, sessions);
    }

    std::vector<Param*> params = model.params();
    AdamState adam = AdamState::init_for(params);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    std::vector<std::size_t> order(dataset.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> loss_history;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t epoch_preds = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_customers) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_customers);
            std::size_t batch_preds = 0;
            for (std::size_t b = start; b < stop; ++b)
                batch_preds += dataset.train[order[b]].size();
            if (batch_preds == 0) continue;

            zero_grads(params);
            const double weight = 1.0 / static_cast<double>(batch_preds);
            for (std::size_t b = start; b < stop; ++b) {
                const CustomerHistory& h = dataset.train[order[b]];
                const std::vector<Vec>& embs = embeddings[order[b]];
                DceState state = model.init_state();
                for (std::size_t begin = 0; begin < h.size(); begin += cfg.max_unroll) {
                    const std::size_t end = std::min(h.size(), begin + cfg.max_unroll);
                    auto [loss, n] =
                        unroll_window(model, h, embs, begin, end, state, true, weight);
                    epoch_loss += loss;
                    epoch_preds += n;
                }
            }
            clip_global_norm(params, 5.0);
            adam_step(params, adam, adam_cfg);
        }
        const double mean_loss = epoch_loss / static_cast<double>(epoch_preds);
        if (!std::isfinite(mean_loss))
            throw NumericError("train_dce: non-finite loss at epoch " + std::to_string(epoch + 1));
        loss_history.push_back(mean_loss);
    }
    return {std::move(model), std::move(loss_history)};
}

}  // namespace dce

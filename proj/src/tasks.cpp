#include "dce/tasks.hpp"

#include <cmath>
#include <functional>

#include "dce/errors.hpp"

namespace dce {

namespace {

using FeatureFn = std::function<Vec(const SessionRows&, std::size_t)>;

Vec concat(const Vec& a, const Vec& b) {
    Vec out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::vector<Vec> feature_matrix(const SessionRows& rows, const FeatureFn& fn) {
    std::vector<Vec> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(fn(rows, i));
    return out;
}

std::vector<std::vector<int>> intent_labels(const SessionRows& rows) {
    std::vector<std::vector<int>> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(rows.obs[i]->session.intents);
    return out;
}

std::vector<int> binary_labels(const SessionRows& rows, bool Session::*field) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.push_back(rows.obs[i]->session.*field ? 1 : 0);
    return out;
}

ScenarioResult run_intent_scenario(const std::string& name, const SessionRows& train,
                                   const SessionRows& eval, const FeatureFn& fn,
                                   const ProbeConfig& cfg) {
    const ProbeModel probe = fit_probe(feature_matrix(train, fn), intent_labels(train),
                                       kNumIntents, cfg);
    const auto scores = probe_scores(probe, feature_matrix(eval, fn));
    const MacroAurocResult m = macro_auroc(scores, intent_labels(eval), kNumIntents);
    ScenarioResult r;
    r.name = name;
    r.auroc = m.macro;
    r.per_class = m.per_class;
    r.eval_skipped_classes = m.skipped;
    r.probe_skipped_classes = probe.skipped_classes;
    return r;
}

ScenarioResult run_binary_scenario(const std::string& name, const SessionRows& train,
                                   const SessionRows& eval, bool Session::*field,
                                   const FeatureFn& fn, const ProbeConfig& cfg,
                                   double challenge_rate) {
    std::vector<std::vector<int>> train_pos;
    train_pos.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        train_pos.push_back(train.obs[i]->session.*field ? std::vector<int>{0}
                                                         : std::vector<int>{});
    const ProbeModel probe = fit_probe(feature_matrix(train, fn), train_pos, 1, cfg);
    const auto score_rows = probe_scores(probe, feature_matrix(eval, fn));
    std::vector<double> scores(score_rows.size());
    for (std::size_t i = 0; i < score_rows.size(); ++i) scores[i] = score_rows[i][0];
    const std::vector<int> labels = binary_labels(eval, field);

    ScenarioResult r;
    r.name = name;
    r.auroc = auroc(scores, labels);
    r.probe_skipped_classes = probe.skipped_classes;
    if (challenge_rate > 0.0) {
        const RecallAtRateResult rec = recall_at_rate(scores, labels, challenge_rate);
        r.recall = rec.recall;
        r.flagged = rec.flagged;
    }
    return r;
}

const FeatureFn kContextFeature = [](const SessionRows& rows, std::size_t i) {
    return rows.obs[i]->context;
};
const FeatureFn kCustomerFeature = [](const SessionRows& rows, std::size_t i) {
    return rows.customer_embedding[i];
};
const FeatureFn kSessionFeature = [](const SessionRows& rows, std::size_t i) {
    return rows.session_embedding[i];
};
const FeatureFn kCustomerPlusContext = [](const SessionRows& rows, std::size_t i) {
    return concat(rows.customer_embedding[i], rows.obs[i]->context);
};
const FeatureFn kSessionPlusCustomer = [](const SessionRows& rows, std::size_t i) {
    return concat(rows.session_embedding[i], rows.customer_embedding[i]);
};

}  // namespace

SessionRows build_session_rows(const std::vector<CustomerHistory>& split,
                               const SessionAutoencoder& sae, const DceModel& model) {
    SessionRows out;
    for (const CustomerHistory& h : split) {
        std::vector<const Session*> sessions;
        sessions.reserve(h.observations.size());
        for (const Observation& o : h.observations) sessions.push_back(&o.session);
        const std::vector<Vec> embs = embed_corpus(sae, sessions);
        DceState state = model.init_state();
        for (std::size_t i = 0; i < h.observations.size(); ++i) {
            const SessionStepFeatures feats =
                make_step_features(h, i, embs, model.config().sess_dim);
            DceStepOutput step = model.step(state, feats);
            state = std::move(step.state);
            out.obs.push_back(&h.observations[i]);
            out.customer_id.push_back(h.customer_id);
            out.session_index.push_back(i + 1);
            out.session_embedding.push_back(embs[i]);
            out.customer_embedding.push_back(std::move(step.customer));
            out.predicted_embedding.push_back(std::move(step.predicted));
        }
    }
    if (out.obs.empty()) throw EmptyInputError("build_session_rows: empty split");
    return out;
}

nlohmann::json NextSessionReport::to_json() const {
    return {{"n_pairs", n_pairs},       {"n_all", n_all},
            {"previous", previous},     {"average", average},
            {"ema", ema},               {"ema_alpha", ema_alpha},
            {"model", model},           {"model_all", model_all}};
}

NextSessionReport eval_next_session(const std::vector<CustomerHistory>& split,
                                    const SessionAutoencoder& sae, const DceModel& model,
                                    const EmaParams& ema) {
    NextSessionReport rep;
    rep.ema_alpha = ema.alpha;
    double sum_prev = 0.0, sum_avg = 0.0, sum_ema = 0.0, sum_model = 0.0, sum_all = 0.0;
    for (const CustomerHistory& h : split) {
        std::vector<const Session*> sessions;
        for (const Observation& o : h.observations) sessions.push_back(&o.session);
        const std::vector<Vec> embs = embed_corpus(sae, sessions);
        DceState state = model.init_state();
        for (std::size_t i = 0; i < h.observations.size(); ++i) {
            const SessionStepFeatures feats =
                make_step_features(h, i, embs, model.config().sess_dim);
            DceStepOutput step = model.step(state, feats);
            state = std::move(step.state);
            const double d_model = cosine_distance(step.predicted, embs[i]);
            sum_all += d_model;
            ++rep.n_all;
            if (i >= 1) {
                const std::size_t idx = i + 1;  // 1-based session number
                sum_prev += cosine_distance(previous_predictor(embs, idx), embs[i]);
                sum_avg += cosine_distance(average_predictor(embs, idx), embs[i]);
                sum_ema += cosine_distance(ema_predictor(embs, idx, ema), embs[i]);
                sum_model += d_model;
                ++rep.n_pairs;
            }
        }
    }
    if (rep.n_pairs == 0)
        throw DegenerateError("eval_next_session: no session has a predecessor");
    rep.previous = sum_prev / static_cast<double>(rep.n_pairs);
    rep.average = sum_avg / static_cast<double>(rep.n_pairs);
    rep.ema = sum_ema / static_cast<double>(rep.n_pairs);
    rep.model = sum_model / static_cast<double>(rep.n_pairs);
    rep.model_all = sum_all / static_cast<double>(rep.n_all);
    return rep;
}

nlohmann::json ScenarioResult::to_json() const {
    nlohmann::json j{{"name", name}, {"auroc", auroc}};
    if (!per_class.empty()) {
        nlohmann::json pc = nlohmann::json::array();
        for (double v : per_class) {
            if (std::isnan(v))
                pc.push_back(nullptr);
            else
                pc.push_back(v);
        }
        j["per_class_auroc"] = pc;
        j["eval_skipped_classes"] = eval_skipped_classes;
    }
    j["probe_skipped_classes"] = probe_skipped_classes;
    if (flagged > 0) {
        j["recall"] = recall;
        j["flagged"] = flagged;
    }
    return j;
}

const ScenarioResult& TaskReport::scenario(const std::string& name) const {
    for (const ScenarioResult& s : scenarios)
        if (s.name == name) return s;
    throw IndexError("task report: unknown scenario " + name);
}

nlohmann::json TaskReport::to_json() const {
    nlohmann::json j{{"task", task}, {"n_train", n_train}, {"n_eval", n_eval}};
    if (challenge_rate > 0.0) j["challenge_rate"] = challenge_rate;
    nlohmann::json arr = nlohmann::json::array();
    for (const ScenarioResult& s : scenarios) arr.push_back(s.to_json());
    j["scenarios"] = arr;
    return j;
}

TaskReport eval_intent_task(const SessionRows& train, const SessionRows& eval,
                            const ProbeConfig& probe_cfg, const SessionRows* train_fused,
                            const SessionRows* eval_fused) {
    TaskReport rep;
    rep.task = "intent";
    rep.n_train = train.size();
    rep.n_eval = eval.size();
    rep.scenarios.push_back(
        run_intent_scenario("context_only", train, eval, kContextFeature, probe_cfg));
    if (train_fused && eval_fused)
        rep.scenarios.push_back(
            run_intent_scenario("fused", *train_fused, *eval_fused, kCustomerFeature, probe_cfg));
    rep.scenarios.push_back(run_intent_scenario("dce", train, eval, kCustomerFeature, probe_cfg));
    rep.scenarios.push_back(
        run_intent_scenario("dce_plus_context", train, eval, kCustomerPlusContext, probe_cfg));
    return rep;
}

TaskReport eval_call_task(const SessionRows& train, const SessionRows& eval,
                          const ProbeConfig& probe_cfg) {
    TaskReport rep;
    rep.task = "call";
    rep.n_train = train.size();
    rep.n_eval = eval.size();
    rep.scenarios.push_back(run_binary_scenario("context_only", train, eval,
                                                &Session::call_within_6h, kContextFeature,
                                                probe_cfg, 0.0));
    rep.scenarios.push_back(run_binary_scenario("session", train, eval, &Session::call_within_6h,
                                                kSessionFeature, probe_cfg, 0.0));
    rep.scenarios.push_back(run_binary_scenario("session_plus_dce", train, eval,
                                                &Session::call_within_6h, kSessionPlusCustomer,
                                                probe_cfg, 0.0));
    return rep;
}

TaskReport eval_fraud_task(const SessionRows& train, const SessionRows& eval,
                           const ProbeConfig& probe_cfg, double challenge_rate) {
    if (!(challenge_rate > 0.0 && challenge_rate <= 1.0))
        throw ConfigError("fraud task: challenge rate must be in (0,1]");
    TaskReport rep;
    rep.task = "fraud";
    rep.n_train = train.size();
    rep.n_eval = eval.size();
    rep.challenge_rate = challenge_rate;
    rep.scenarios.push_back(run_binary_scenario("context_only", train, eval, &Session::fraud,
                                                kContextFeature, probe_cfg, challenge_rate));
    rep.scenarios.push_back(run_binary_scenario("context_plus_dce", train, eval, &Session::fraud,
                                                kCustomerPlusContext, probe_cfg, challenge_rate));
    return rep;
}

}  // namespace dce

#include "dce/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "dce/baselines.hpp"
#include "dce/checkpoint.hpp"
#include "dce/customer_model.hpp"
#include "dce/errors.hpp"
#include "dce/fs_util.hpp"
#include "dce/generator.hpp"
#include "dce/session_autoencoder.hpp"
#include "dce/tasks.hpp"

namespace dce {

namespace {

using nlohmann::json;

bool log_enabled() {
    const char* v = std::getenv("DCE_LOG");
    return v != nullptr && *v != '\0';
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[dce] " << msg << "\n";
}

std::string text_twin_path(const std::string& json_path) {
    const std::string suffix = ".json";
    if (json_path.size() > suffix.size() &&
        json_path.compare(json_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return json_path.substr(0, json_path.size() - suffix.size()) + ".txt";
    return json_path + ".txt";
}

void write_loss_sidecar(const std::string& ckpt_path, const std::string& stage,
                        const std::vector<double>& losses) {
    json j{{"stage", stage}, {"loss", losses}};
    atomic_write_file(ckpt_path + ".loss.json", j.dump(2) + "\n");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}

std::vector<const Session*> train_corpus(const Dataset& ds) {
    std::vector<const Session*> out;
    for (const auto& h : ds.train)
        for (const auto& obs : h.observations) out.push_back(&obs.session);
    return out;
}

EmaParams load_ema_checkpoint(const std::string& path) {
    const Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.manifest.value("kind", "") != "ema")
        throw IoError("not an ema checkpoint: " + path);
    EmaParams p;
    p.alpha = ckpt.tensors.at("alpha").data.at(0);
    return p;
}

std::string render_next(const NextSessionReport& r) {
    std::ostringstream os;
    os << "next-session embedding prediction (test split)\n"
       << "  prediction pairs: " << r.n_pairs << "\n"
       << "  mean cosine distance\n"
       << "    previous session : " << fmt(r.previous) << "\n"
       << "    running average  : " << fmt(r.average) << "\n"
       << "    ema (alpha=" << fmt(r.ema_alpha) << ") : " << fmt(r.ema) << "\n"
       << "    recurrent model  : " << fmt(r.model) << "\n"
       << "  model incl. first sessions (" << r.n_all << "): " << fmt(r.model_all) << "\n";
    return os.str();
}

std::string render_task(const TaskReport& r) {
    std::ostringstream os;
    os << r.task << " task: " << r.n_train << " train rows, " << r.n_eval << " eval rows\n";
    if (r.challenge_rate > 0.0) os << "  challenge rate: " << fmt(r.challenge_rate) << "\n";
    for (const auto& s : r.scenarios) {
        os << "  " << std::left << std::setw(18) << s.name << " auroc " << fmt(s.auroc);
        if (s.flagged > 0)
            os << "  recall " << fmt(s.recall) << " (" << s.flagged << " flagged)";
        os << "\n";
        if (!s.per_class.empty()) {
            const auto& names = intent_names();
            for (std::size_t k = 0; k < s.per_class.size(); ++k) {
                os << "      " << std::left << std::setw(28) << names[k];
                if (std::isnan(s.per_class[k]))
                    os << "skipped\n";
                else
                    os << fmt(s.per_class[k]) << "\n";
            }
        }
    }
    return os.str();
}

void write_report(const std::string& out, const json& machine, const std::string& human) {
    atomic_write_file(out, machine.dump(2) + "\n");
    atomic_write_file(text_twin_path(out), human);
}

}  // namespace

json cmd_generate(const GenConfig& cfg, const std::string& out_path) {
    log_line("generating population");
    const Dataset ds = generate_population(cfg);
    save_dataset(out_path, ds);
    return dataset_summary(ds);
}

void cmd_train(const std::string& stage, const std::string& data_path, const RunConfig& rc,
               const std::string& sae_path, const std::string& out_path) {
    log_line("loading dataset " + data_path);
    const Dataset ds = load_dataset(data_path);

    if (stage == "sae") {
        log_line("training session autoencoder");
        auto [model, losses] = train_autoencoder(train_corpus(ds), ds.vocab.size(), rc.sae);
        model.save(out_path);
        write_loss_sidecar(out_path, stage, losses);
        return;
    }

    if (sae_path.empty()) throw ConfigError("train --stage " + stage + " requires --sae");
    const SessionAutoencoder sae = SessionAutoencoder::load(sae_path);

    if (stage == "dce" || stage == "fused") {
        DceTrainConfig cfg = rc.dce;
        cfg.model.sess_dim = sae.embed_dim();
        cfg.model.mode = stage == "fused" ? DceMode::FusedVanilla : DceMode::FiveStream;
        log_line("training customer model (" + stage + ")");
        auto [model, losses] = train_dce(ds, sae, cfg);
        json echo{{"epochs", cfg.epochs},
                  {"lr", cfg.lr},
                  {"batch_customers", cfg.batch_customers},
                  {"max_unroll", cfg.max_unroll},
                  {"seed", cfg.seed}};
        model.save(out_path, echo);
        write_loss_sidecar(out_path, stage, losses);
        return;
    }

    if (stage == "ema") {
        log_line("fitting ema weight");
        std::vector<std::vector<Vec>> per_customer;
        per_customer.reserve(ds.train.size());
        for (const auto& h : ds.train) {
            std::vector<const Session*> sessions;
            for (const auto& obs : h.observations) sessions.push_back(&obs.session);
            per_customer.push_back(embed_corpus(sae, sessions));
        }
        const EmaFitResult fit = fit_ema_alpha(per_customer, rc.ema);
        Param alpha("alpha", Tensor({1}));
        alpha.value.data[0] = fit.params.alpha;
        json manifest{{"kind", "ema"},
                      {"train_distance", fit.train_distance},
                      {"fit",
                       {{"init_alpha", rc.ema.init_alpha},
                        {"iterations", rc.ema.iterations},
                        {"lr", rc.ema.lr}}}};
        save_checkpoint(out_path, manifest, {&alpha});
        write_loss_sidecar(out_path, stage, {fit.train_distance});
        return;
    }

    throw ConfigError("unknown train stage: " + stage);
}

json cmd_eval(const std::string& task, const std::string& data_path, const RunConfig& rc,
              const std::string& sae_path, const std::string& dce_path,
              const std::string& fused_path, const std::string& ema_path,
              double challenge_rate, const std::string& out_path) {
    log_line("loading dataset " + data_path);
    const Dataset ds = load_dataset(data_path);
    const SessionAutoencoder sae = SessionAutoencoder::load(sae_path);
    const DceModel model = DceModel::load(dce_path);

    if (task == "next") {
        if (ema_path.empty()) throw ConfigError("eval --task next requires --ema");
        const EmaParams ema = load_ema_checkpoint(ema_path);
        const NextSessionReport rep = eval_next_session(ds.test, sae, model, ema);
        json j = rep.to_json();
        j["task"] = "next";
        write_report(out_path, j, render_next(rep));
        return j;
    }

    log_line("building feature rows");
    const SessionRows train_rows = build_session_rows(ds.train, sae, model);
    const SessionRows eval_rows = build_session_rows(ds.test, sae, model);

    TaskReport rep;
    if (task == "intent") {
        if (!fused_path.empty()) {
            const DceModel fused = DceModel::load(fused_path);
            const SessionRows train_fused = build_session_rows(ds.train, sae, fused);
            const SessionRows eval_fused = build_session_rows(ds.test, sae, fused);
            rep = eval_intent_task(train_rows, eval_rows, rc.probe, &train_fused, &eval_fused);
        } else {
            rep = eval_intent_task(train_rows, eval_rows, rc.probe);
        }
    } else if (task == "call") {
        rep = eval_call_task(train_rows, eval_rows, rc.probe);
    } else if (task == "fraud") {
        if (!(challenge_rate > 0.0 && challenge_rate <= 1.0))
            throw ConfigError("challenge rate must be in (0,1]");
        rep = eval_fraud_task(train_rows, eval_rows, rc.probe, challenge_rate);
    } else {
        throw ConfigError("unknown eval task: " + task);
    }
    const json j = rep.to_json();
    write_report(out_path, j, render_task(rep));
    return j;
}

}  // namespace dce

#include "dce/run_config.hpp"

#include <cstdint>
#include <sstream>
#include <string>

#include "dce/errors.hpp"
#include "dce/fs_util.hpp"

namespace dce {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError("config: trailing junk in value for " + key + ": '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0.0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
        throw ConfigError("config: " + key + " must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(parse_u64(key, value));
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
    RunConfig rc;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");

        if (key == "gen.seed") rc.gen.seed = parse_u64(key, value);
        else if (key == "gen.n_customers") rc.gen.n_customers = parse_size(key, value);
        else if (key == "gen.mean_sessions") rc.gen.mean_sessions = parse_double(key, value);
        else if (key == "gen.min_sessions") rc.gen.min_sessions = parse_size(key, value);
        else if (key == "gen.event_vocab_size") rc.gen.event_vocab_size = parse_size(key, value);
        else if (key == "gen.fraud_rate") rc.gen.fraud_rate = parse_double(key, value);
        else if (key == "gen.call_rate") rc.gen.call_rate = parse_double(key, value);
        else if (key == "gen.aimless_rate") rc.gen.aimless_rate = parse_double(key, value);
        else if (key == "gen.gap_median_days") rc.gen.gap_median_days = parse_double(key, value);
        else if (key == "gen.gap_sigma") rc.gen.gap_sigma = parse_double(key, value);
        else if (key == "gen.test_fraction") rc.gen.test_fraction = parse_double(key, value);
        else if (key == "gen.val_fraction") rc.gen.val_fraction = parse_double(key, value);
        else if (key == "sae.embed_dim") rc.sae.embed_dim = parse_size(key, value);
        else if (key == "sae.token_dim") rc.sae.token_dim = parse_size(key, value);
        else if (key == "sae.max_len") rc.sae.max_len = parse_size(key, value);
        else if (key == "sae.epochs") rc.sae.epochs = parse_size(key, value);
        else if (key == "sae.lr") rc.sae.lr = parse_double(key, value);
        else if (key == "sae.batch_size") rc.sae.batch_size = parse_size(key, value);
        else if (key == "sae.seed") rc.sae.seed = parse_u64(key, value);
        else if (key == "dce.hidden") rc.dce.model.hidden = parse_size(key, value);
        else if (key == "dce.mlp_hidden") rc.dce.model.mlp_hidden = parse_size(key, value);
        else if (key == "dce.stream_out") rc.dce.model.stream_out = parse_size(key, value);
        else if (key == "dce.cust_dim") rc.dce.model.cust_dim = parse_size(key, value);
        else if (key == "dce.day_dim") rc.dce.model.day_dim = parse_size(key, value);
        else if (key == "dce.week_dim") rc.dce.model.week_dim = parse_size(key, value);
        else if (key == "dce.month_dim") rc.dce.model.month_dim = parse_size(key, value);
        else if (key == "dce.epochs") rc.dce.epochs = parse_size(key, value);
        else if (key == "dce.lr") rc.dce.lr = parse_double(key, value);
        else if (key == "dce.batch_customers") rc.dce.batch_customers = parse_size(key, value);
        else if (key == "dce.max_unroll") rc.dce.max_unroll = parse_size(key, value);
        else if (key == "dce.seed") rc.dce.seed = parse_u64(key, value);
        else if (key == "ema.init_alpha") rc.ema.init_alpha = parse_double(key, value);
        else if (key == "ema.iterations") rc.ema.iterations = parse_size(key, value);
        else if (key == "ema.lr") rc.ema.lr = parse_double(key, value);
        else if (key == "probe.epochs") rc.probe.epochs = parse_size(key, value);
        else if (key == "probe.lr") rc.probe.lr = parse_double(key, value);
        else if (key == "probe.l2") rc.probe.l2 = parse_double(key, value);
        else if (key == "probe.max_rows") rc.probe.max_rows = parse_size(key, value);
        else if (key == "probe.seed") rc.probe.seed = parse_u64(key, value);
        else if (key == "eval.challenge_rate") rc.challenge_rate = parse_double(key, value);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    // The customer model consumes the autoencoder's embeddings, so its input
    // width always tracks the autoencoder setting.
    rc.dce.model.sess_dim = rc.sae.embed_dim;
    rc.dce.model.ctx_dim = kContextDim;
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config_text(read_file(path));
}

}  // namespace dce

#include "dce/dataset_io.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/fs_util.hpp"

namespace dce {

namespace {

using nlohmann::json;

json session_record(const Observation& obs, const char* split) {
    const Session& s = obs.session;
    json events = json::array();
    for (const Event& e : s.events) events.push_back({e.id, e.t});
    json rec;
    rec["customer"] = s.customer_id;
    rec["t"] = s.t_login;
    rec["split"] = split;
    rec["events"] = events;
    rec["intents"] = s.intents;
    rec["fraud"] = s.fraud ? 1 : 0;
    rec["call"] = s.call_within_6h ? 1 : 0;
    rec["context"] = obs.context;
    return rec;
}

Observation observation_from_record(const json& rec) {
    Observation obs;
    Session& s = obs.session;
    s.customer_id = rec.at("customer").get<std::int64_t>();
    s.t_login = rec.at("t").get<std::int64_t>();
    for (const auto& e : rec.at("events"))
        s.events.push_back({e.at(0).get<int>(), e.at(1).get<std::int64_t>()});
    s.intents = rec.at("intents").get<std::vector<int>>();
    s.fraud = rec.at("fraud").get<int>() != 0;
    s.call_within_6h = rec.at("call").get<int>() != 0;
    obs.context = rec.at("context").get<std::vector<double>>();
    return obs;
}

}  // namespace

json gen_config_to_json(const GenConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["n_customers"] = cfg.n_customers;
    j["mean_sessions"] = cfg.mean_sessions;
    j["min_sessions"] = cfg.min_sessions;
    j["event_vocab_size"] = cfg.event_vocab_size;
    j["n_intents"] = cfg.n_intents;
    j["fraud_rate"] = cfg.fraud_rate;
    j["call_rate"] = cfg.call_rate;
    j["aimless_rate"] = cfg.aimless_rate;
    j["gap_median_days"] = cfg.gap_median_days;
    j["gap_sigma"] = cfg.gap_sigma;
    j["test_fraction"] = cfg.test_fraction;
    j["val_fraction"] = cfg.val_fraction;
    return j;
}

GenConfig gen_config_from_json(const json& j) {
    GenConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.n_customers = j.at("n_customers").get<std::size_t>();
    cfg.mean_sessions = j.at("mean_sessions").get<double>();
    cfg.min_sessions = j.at("min_sessions").get<std::size_t>();
    cfg.event_vocab_size = j.at("event_vocab_size").get<std::size_t>();
    cfg.n_intents = j.at("n_intents").get<std::size_t>();
    cfg.fraud_rate = j.at("fraud_rate").get<double>();
    cfg.call_rate = j.at("call_rate").get<double>();
    cfg.aimless_rate = j.at("aimless_rate").get<double>();
    cfg.gap_median_days = j.at("gap_median_days").get<double>();
    cfg.gap_sigma = j.at("gap_sigma").get<double>();
    cfg.test_fraction = j.at("test_fraction").get<double>();
    cfg.val_fraction = j.at("val_fraction").get<double>();
    return cfg;
}

void save_dataset(const std::string& path, const Dataset& ds) {
    json cats = json::array();
    for (const auto& c : context_categories())
        cats.push_back({{"name", c.name}, {"offset", c.offset}, {"width", c.width}});

    json header;
    header["format"] = "dce-dataset";
    header["version"] = 1;
    header["seed"] = ds.config.seed;
    header["gen_config"] = gen_config_to_json(ds.config);
    header["event_vocab"] = ds.vocab.names;
    header["intent_names"] = intent_names();
    header["context_categories"] = cats;
    header["counts"] = {{"train_customers", ds.train.size()},
                        {"val_customers", ds.val.size()},
                        {"test_customers", ds.test.size()},
                        {"sessions", ds.total_sessions()}};

    // Records sorted by (customer id, t): collect per customer, then merge.
    struct Tagged {
        const Observation* obs;
        const char* split;
    };
    std::map<std::int64_t, std::vector<Tagged>> by_customer;
    for (const auto& h : ds.train)
        for (const auto& o : h.observations) by_customer[h.customer_id].push_back({&o, "train"});
    for (const auto& h : ds.val)
        for (const auto& o : h.observations) by_customer[h.customer_id].push_back({&o, "val"});
    for (const auto& h : ds.test)
        for (const auto& o : h.observations) by_customer[h.customer_id].push_back({&o, "test"});

    std::ostringstream out;
    out << header.dump() << "\n";
    for (auto& [cid, rows] : by_customer) {
        std::stable_sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) {
            return a.obs->session.t_login < b.obs->session.t_login;
        });
        for (const Tagged& row : rows) out << session_record(*row.obs, row.split).dump() << "\n";
    }
    atomic_write_file(path, out.str());
}

Dataset load_dataset(const std::string& path) {
    std::istringstream input(read_file(path));
    std::string line;
    if (!std::getline(input, line)) throw IoError("empty dataset file: " + path);

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError(std::string("bad dataset header: ") + e.what());
    }
    if (header.value("format", "") != "dce-dataset")
        throw IoError("not a dce dataset file: " + path);

    Dataset ds;
    ds.config = gen_config_from_json(header.at("gen_config"));
    ds.vocab.names = header.at("event_vocab").get<std::vector<std::string>>();

    std::map<std::int64_t, CustomerHistory> train, val, test;
    std::size_t line_no = 1;
    while (std::getline(input, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("bad record at line " + std::to_string(line_no) + ": " + e.what());
        }
        Observation obs = observation_from_record(rec);
        const std::string split = rec.at("split").get<std::string>();
        const std::int64_t cid = obs.session.customer_id;
        auto* bucket = split == "train" ? &train : split == "val" ? &val : split == "test" ? &test : nullptr;
        if (!bucket) throw IoError("unknown split tag at line " + std::to_string(line_no));
        CustomerHistory& h = (*bucket)[cid];
        h.customer_id = cid;
        h.observations.push_back(std::move(obs));
    }

    for (auto& [cid, h] : train) ds.train.push_back(std::move(h));
    for (auto& [cid, h] : val) ds.val.push_back(std::move(h));
    for (auto& [cid, h] : test) ds.test.push_back(std::move(h));
    try {
        validate_dataset(ds);
    } catch (const Error& e) {
        // A stored dataset that breaks the format invariants is a corrupt file.
        throw IoError("invalid dataset file " + path + ": " + e.what());
    }
    return ds;
}

json dataset_summary(const Dataset& ds) {
    std::size_t sessions = 0, frauds = 0, calls = 0;
    auto tally = [&](const std::vector<CustomerHistory>& hs) {
        for (const auto& h : hs)
            for (const auto& o : h.observations) {
                ++sessions;
                frauds += o.session.fraud ? 1 : 0;
                calls += o.session.call_within_6h ? 1 : 0;
            }
    };
    tally(ds.train);
    tally(ds.val);
    tally(ds.test);

    json j;
    j["customers"] = ds.train.size() + ds.test.size();
    j["train_customers"] = ds.train.size();
    j["val_customers"] = ds.val.size();
    j["test_customers"] = ds.test.size();
    j["sessions"] = sessions;
    j["fraud_rate"] = sessions ? static_cast<double>(frauds) / sessions : 0.0;
    j["call_rate"] = sessions ? static_cast<double>(calls) / sessions : 0.0;
    return j;
}

}  // namespace dce

#include "dce/generator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dce/errors.hpp"
#include "dce/rng.hpp"

namespace dce {

namespace {

constexpr std::int64_t kEpochStart = 1609459200;  // 2021-01-01T00:00:00Z

constexpr int kIntentCreditReport = 0;
constexpr int kIntentDeposit = 1;
constexpr int kIntentOverdraft = 2;
constexpr int kIntentBankTransactions = 3;
constexpr int kIntentTransactionMgmt = 5;
constexpr int kIntentStatements = 6;
constexpr int kIntentActivate = 7;
constexpr int kIntentRedeem = 8;
constexpr int kIntentNonPurchase = 9;
constexpr int kIntentAlterTerms = 10;
constexpr int kIntentAuthorizedUser = 12;
constexpr int kIntentReplaceCard = 13;
constexpr int kIntentChecks = 14;
constexpr int kIntentAccountUpdate = 15;

// Intents whose sessions tend to precede a service call.
constexpr std::array<int, 5> kConfusingIntents = {
    kIntentOverdraft, kIntentNonPurchase, kIntentAlterTerms,
    kIntentReplaceCard, kIntentChecks};

bool has_confusing_intent(const std::vector<int>& intents) {
    for (int k : intents)
        for (int c : kConfusingIntents)
            if (k == c) return true;
    return false;
}

// Resting per-intent log-odds before persona and situational boosts.
constexpr std::array<double, kNumIntents> kBaseLogit = {
    -3.0,  // Credit Report
    -2.8,  // Deposit
    -3.3,  // Overdraft Settings
    -1.9,  // Bank Transactions
    -1.7,  // Account Summary
    -2.6,  // Transaction Management
    -2.4,  // Statements and Documents
    -3.0,  // Activate
    -3.0,  // Redeem with bank
    -3.3,  // Non Purchase Transaction
    -3.3,  // Alter Production Terms
    -2.2,  // Payment
    -3.4,  // Authorized User
    -3.3,  // Replace Card
    -3.4,  // Checks
    -3.2,  // Account Update
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

std::string slug(const std::string& name) {
    std::string out;
    for (char c : name) out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(c)));
    return out;
}

// Slowly moving per-customer account facts the context readouts draw from.
struct LatentState {
    std::array<double, kNumIntents> persona{};
    double utilization = 0.3;
    double rewards = 0.0;
    double spend_rate = 1.5;  // card transactions per day
    double credit_line = 8000.0;
    double account_age_days = 1000.0;
    double last_payment = 200.0;
    int due_day = 10;     // day of month a payment is due
    int payday_dow = 4;   // 0 = Monday
    bool autopay = false;
    bool message_pending = false;
    int recent_txns = 0;  // transactions since the previous session
};

std::vector<Event> make_events(Rng& rng, const GenConfig& cfg,
                               const std::vector<int>& intents, std::int64_t t_login) {
    const int nav_base = 2 + 3 * static_cast<int>(cfg.n_intents);
    const int nav_count_ids = static_cast<int>(cfg.event_vocab_size) - nav_base;

    std::vector<int> middle;
    for (int k : intents) {
        const std::size_t count = 1 + std::min<std::uint64_t>(rng.poisson(1.0), 3);
        for (std::size_t j = 0; j < count; ++j)
            middle.push_back(2 + 3 * k + static_cast<int>(rng.uniform_int(3)));
    }
    const std::size_t navs = intents.empty()
                                 ? 2 + std::min<std::uint64_t>(rng.poisson(2.0), 6)
                                 : std::min<std::uint64_t>(rng.poisson(1.2), 4);
    for (std::size_t j = 0; j < navs; ++j)
        middle.push_back(nav_base + static_cast<int>(rng.uniform_int(nav_count_ids)));
    rng.shuffle(middle);

    std::vector<Event> events;
    events.reserve(middle.size() + 2);
    events.push_back({kEventLogin, t_login});
    std::int64_t t = t_login;
    for (int id : middle) {
        t += 5 + static_cast<std::int64_t>(rng.uniform_int(176));
        events.push_back({id, t});
    }
    t += 5 + static_cast<std::int64_t>(rng.uniform_int(56));
    events.push_back({kEventLogout, t});
    return events;
}

// Snapshot of account readouts at login. Widths and offsets follow
// context_categories(); dims not tied to a modeled quantity carry scaled
// noise so every feature is populated.
FinancialContext make_context(Rng& rng, const LatentState& st, const CalendarFields& cal,
                              bool fraud, double gap_days, int days_until_due) {
    static constexpr std::array<double, 7> kScales = {0.1, 1.0, 10.0, 100.0, 1000.0, 1.0, 5.0};
    FinancialContext ctx(kContextDim, 0.0);
    for (std::size_t j = 0; j < kContextDim; ++j)
        ctx[j] = kScales[j % kScales.size()] * rng.normal(0.0, 0.3);

    // posted_transactions
    ctx[0] = st.recent_txns + rng.normal(0.0, 1.0);
    ctx[1] = st.spend_rate * 30.0 + rng.normal(0.0, 3.0);
    ctx[2] = st.recent_txns * 55.0 + rng.normal(0.0, 40.0);
    ctx[3] = st.spend_rate * 30.0 * 55.0 + rng.normal(0.0, 150.0);
    ctx[9] = std::max(0.0, gap_days * rng.uniform(0.0, 1.0));

    // transaction_authorization
    ctx[10] = st.spend_rate + rng.normal(0.0, 0.6);
    ctx[11] = fraud ? (rng.uniform() < 0.55 ? 1.0 + static_cast<double>(rng.poisson(1.2)) : 0.0) +
                          rng.normal(0.0, 0.2)
                    : (rng.uniform() < 0.05 ? 1.0 : 0.0) + rng.normal(0.0, 0.2);

    // account
    ctx[57] = st.account_age_days + rng.normal(0.0, 2.0);
    ctx[58] = 1.0 + static_cast<double>(rng.poisson(1.3));
    ctx[59] = st.credit_line + rng.normal(0.0, 25.0);
    // Noisy single-snapshot readouts of the customer's current leanings
    // (product holdings, recent service touches). One snapshot is a weak
    // predictor; integrating them across sessions is informative.
    for (std::size_t k = 0; k < kNumIntents; ++k)
        ctx[61 + k] = st.persona[k] + rng.normal(0.0, 1.9);

    // utilization
    ctx[86] = clamp(st.utilization + rng.normal(0.0, 0.02), 0.0, 1.2);
    ctx[87] = st.utilization * st.credit_line + rng.normal(0.0, 50.0);
    ctx[88] = clamp(st.utilization + rng.normal(0.0, 0.08), 0.0, 1.2);

    // payments
    ctx[106] = days_until_due + rng.normal(0.0, 0.25);
    ctx[107] = st.last_payment + rng.normal(0.0, 10.0);
    ctx[108] = st.autopay ? 1.0 : 0.0;

    // rewards
    ctx[118] = std::max(0.0, st.rewards + rng.normal(0.0, 20.0));
    ctx[119] = 2.2 * st.spend_rate * 30.0 + rng.normal(0.0, 15.0);

    // digital_messaging
    ctx[128] = st.message_pending ? 1.0 + static_cast<double>(rng.poisson(1.5))
                                  : (rng.uniform() < 0.1 ? 1.0 : 0.0);
    ctx[129] = static_cast<double>(rng.poisson(4.0));

    // fraud; overlapping distributions, so the risk score alone cannot
    // separate the classes and behavioral history still adds recall
    ctx[134] = fraud ? rng.normal(0.40, 0.25) : rng.normal(0.15, 0.12);
    ctx[135] = fraud ? (rng.uniform() < 0.5 ? 1.0 : 0.0) + rng.normal(0.0, 0.5)
                     : rng.normal(0.1, 0.3);

    // Calendar hint mirrored into an account dim so the context stream is not
    // blind to seasonality.
    ctx[60] = static_cast<double>(cal.day_of_week) + rng.normal(0.0, 0.1);

    for (std::size_t j = 0; j < kContextDim; ++j)
        ctx[j] = std::round(ctx[j] * 1e6) / 1e6;
    return ctx;
}

CustomerHistory simulate_customer(const GenConfig& cfg, std::int64_t customer_id, Rng& rng) {
    LatentState st;
    for (std::size_t k = 0; k < kNumIntents; ++k) st.persona[k] = rng.normal(0.0, 0.8);
    st.utilization = rng.uniform(0.05, 0.9);
    st.rewards = rng.uniform(0.0, 6000.0);
    st.spend_rate = rng.lognormal(std::log(1.5), 0.6);
    st.credit_line = rng.uniform(2000.0, 20000.0);
    st.account_age_days = rng.uniform(300.0, 4000.0);
    st.last_payment = rng.uniform(50.0, 800.0);
    st.due_day = 1 + static_cast<int>(rng.uniform_int(28));
    st.payday_dow = static_cast<int>(rng.uniform_int(5));
    st.autopay = rng.uniform() < 0.35;
    st.message_pending = rng.uniform() < 0.3;

    const double extra_mean = cfg.mean_sessions - static_cast<double>(cfg.min_sessions);
    std::size_t n_sessions = cfg.min_sessions;
    if (extra_mean > 0.0) {
        const double p = 4.0 / (4.0 + extra_mean);
        n_sessions += static_cast<std::size_t>(rng.negative_binomial(4, p));
        const std::size_t cap = cfg.min_sessions + static_cast<std::size_t>(6.0 * extra_mean) + 8;
        n_sessions = std::min(n_sessions, cap);
    }

    CustomerHistory history;
    history.customer_id = customer_id;
    history.observations.reserve(n_sessions);

    std::vector<std::int64_t> calls;
    std::vector<int> prev_intents;
    bool prev_confusing = false;
    std::int64_t t_prev_end = 0;

    for (std::size_t i = 0; i < n_sessions; ++i) {
        const bool fraud = i >= 1 && rng.uniform() < cfg.fraud_rate;

        std::int64_t t_login;
        double gap_days;
        if (i == 0) {
            t_login = kEpochStart + static_cast<std::int64_t>(rng.uniform_int(180 * 86400)) +
                      static_cast<std::int64_t>(rng.uniform_int(86400));
            gap_days = 3.0;
            st.recent_txns = static_cast<int>(rng.poisson(st.spend_rate * 3.0));
        } else {
            std::int64_t gap_s;
            if (fraud) {
                // Takeover logins come back within the hour, not days later.
                gap_s = 120 + static_cast<std::int64_t>(rng.uniform_int(3480));
            } else {
                double g = rng.lognormal(std::log(cfg.gap_median_days * 86400.0), cfg.gap_sigma);
                g = clamp(g, 1800.0, 60.0 * 86400.0);
                gap_s = static_cast<std::int64_t>(std::llround(g));
            }
            t_login = t_prev_end + gap_s;
            gap_days = static_cast<double>(gap_s) / 86400.0;
            st.recent_txns = static_cast<int>(rng.poisson(st.spend_rate * std::min(gap_days, 30.0)));
        }
        st.utilization = clamp(st.utilization + 0.006 * st.recent_txns + rng.normal(0.0, 0.02),
                               0.02, 0.98);
        st.rewards += 2.2 * st.recent_txns;
        if (rng.uniform() < 0.25) st.message_pending = true;
        st.account_age_days += gap_days;
        // Tastes drift: a random walk decorrelates old sessions from new ones,
        // so recent behavior genuinely predicts the next session better than
        // the all-time mean does.
        for (double& p : st.persona) p = clamp(p + rng.normal(0.0, 0.12), -2.5, 2.5);

        const CalendarFields cal = calendar_from_epoch(t_login);
        int days_until_due = st.due_day - cal.day_of_month;
        if (days_until_due < 0) days_until_due += 30;

        std::vector<int> chosen;
        if (fraud) {
            chosen = {kIntentRedeem, kIntentReplaceCard, kIntentAccountUpdate};
        } else if (!(rng.uniform() < cfg.aimless_rate)) {
            std::array<double, kNumIntents> logit;
            for (std::size_t k = 0; k < kNumIntents; ++k) logit[k] = kBaseLogit[k] + st.persona[k];
            for (int k : prev_intents) logit[k] += 2.6;
            for (int k : prev_intents) {
                if (k == kIntentPayment) logit[kIntentAccountSummary] += 2.6;
                if (k == kIntentActivate) logit[kIntentTransactionMgmt] += 2.8;
                if (k == kIntentReplaceCard) logit[kIntentAccountUpdate] += 3.0;
            }
            logit[kIntentPayment] += 2.5 * st.utilization + (days_until_due <= 5 ? 1.6 : 0.0) -
                                     (st.autopay ? 1.0 : 0.0);
            logit[kIntentDeposit] += cal.day_of_week == st.payday_dow ? 1.8 : 0.0;
            logit[kIntentRedeem] += std::min(st.rewards / 4000.0, 1.2);
            logit[kIntentStatements] += (st.message_pending ? 1.6 : 0.0) +
                                        (cal.week_of_month == 0 ? 0.8 : 0.0);
            logit[kIntentBankTransactions] += std::min(0.05 * st.recent_txns, 1.5);
            logit[kIntentTransactionMgmt] += std::min(0.04 * st.recent_txns, 1.2);
            if (cal.day_of_week >= 5) {
                logit[kIntentAccountSummary] += 0.5;
                logit[kIntentPayment] -= 0.3;
            }
            for (std::size_t k = 0; k < kNumIntents; ++k)
                if (rng.uniform() < sigmoid(logit[k])) chosen.push_back(static_cast<int>(k));
        }

        Observation obs;
        obs.session.customer_id = customer_id;
        obs.session.t_login = t_login;
        obs.session.events = make_events(rng, cfg, chosen, t_login);
        obs.session.intents = label_intents(obs.session.events);
        obs.session.fraud = fraud;
        obs.context = make_context(rng, st, cal, fraud, gap_days, days_until_due);

        // Coefficients chosen so the marginal flag rate lands near call_rate
        // under the empirical prevalence of confusing sessions (~0.28 now,
        // ~0.27 in the previous session).
        const bool confusing_now = has_confusing_intent(obs.session.intents);
        const double hazard =
            std::min(cfg.call_rate * (0.14 + (confusing_now ? 1.72 : 0.0) +
                                      (prev_confusing ? 0.62 : 0.0) + (fraud ? 9.0 : 0.0)),
                     0.9);
        const std::int64_t t_end = obs.session.t_end();
        if (rng.uniform() < hazard) {
            calls.push_back(t_end + 1 + static_cast<std::int64_t>(rng.uniform_int(kCallWindowSeconds)));
        } else if (rng.uniform() < cfg.call_rate * 0.2) {
            // Unrelated call well outside the attribution window.
            calls.push_back(t_end + kCallWindowSeconds + 1 +
                            static_cast<std::int64_t>(rng.uniform_int(64800)));
        }

        for (int k : obs.session.intents) {
            if (k == kIntentPayment) {
                st.last_payment = std::max(20.0, st.utilization * st.credit_line *
                                                     rng.uniform(0.2, 0.9));
                st.utilization *= rng.uniform(0.15, 0.5);
            }
            if (k == kIntentRedeem) st.rewards *= rng.uniform(0.05, 0.25);
            if (k == kIntentStatements) st.message_pending = false;
        }

        prev_intents = obs.session.intents;
        prev_confusing = confusing_now;
        t_prev_end = t_end;
        history.observations.push_back(std::move(obs));
    }

    attach_call_labels(history, calls);
    return history;
}

}  // namespace

void GenConfig::validate() const {
    if (n_customers == 0) throw ConfigError("gen: n_customers must be positive");
    if (n_intents != kNumIntents)
        throw ConfigError("gen: n_intents must equal the fixed intent taxonomy size");
    if (event_vocab_size < 2 + 3 * n_intents + 1)
        throw ConfigError("gen: event_vocab_size too small for markers, motifs and browsing");
    if (min_sessions < 2) throw ConfigError("gen: min_sessions must be at least 2");
    if (mean_sessions < static_cast<double>(min_sessions))
        throw ConfigError("gen: mean_sessions must be >= min_sessions");
    if (fraud_rate < 0.0 || fraud_rate > 0.5) throw ConfigError("gen: fraud_rate out of range");
    if (call_rate < 0.0 || call_rate > 0.5) throw ConfigError("gen: call_rate out of range");
    if (aimless_rate < 0.0 || aimless_rate > 1.0)
        throw ConfigError("gen: aimless_rate out of range");
    if (gap_median_days <= 0.0) throw ConfigError("gen: gap_median_days must be positive");
    if (gap_sigma < 0.0) throw ConfigError("gen: gap_sigma must be non-negative");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("gen: test_fraction must be in (0,1)");
    if (val_fraction < 0.0 || val_fraction > 0.9)
        throw ConfigError("gen: val_fraction out of range");
}

EventVocab make_event_vocab(const GenConfig& cfg) {
    EventVocab vocab;
    vocab.names.reserve(cfg.event_vocab_size);
    vocab.names.push_back("login");
    vocab.names.push_back("logout");
    const auto& intents = intent_names();
    for (std::size_t k = 0; k < cfg.n_intents; ++k) {
        const std::string base = slug(intents[k]);
        vocab.names.push_back(base + "_a");
        vocab.names.push_back(base + "_b");
        vocab.names.push_back(base + "_c");
    }
    std::size_t nav = 0;
    while (vocab.names.size() < cfg.event_vocab_size)
        vocab.names.push_back("nav_" + std::to_string(nav++));
    return vocab;
}

int intent_of_event(int event_id) {
    if (event_id < 2 || event_id >= 2 + 3 * static_cast<int>(kNumIntents)) return -1;
    return (event_id - 2) / 3;
}

std::vector<int> label_intents(const std::vector<Event>& events) {
    std::array<bool, kNumIntents> seen{};
    for (const Event& e : events) {
        const int k = intent_of_event(e.id);
        if (k >= 0) seen[static_cast<std::size_t>(k)] = true;
    }
    std::vector<int> out;
    for (std::size_t k = 0; k < kNumIntents; ++k)
        if (seen[k]) out.push_back(static_cast<int>(k));
    if (out.empty()) out.push_back(kIntentAccountSummary);
    return out;
}

void attach_call_labels(CustomerHistory& history, const std::vector<std::int64_t>& call_times) {
    for (Observation& obs : history.observations) {
        const std::int64_t end = obs.session.t_end();
        bool hit = false;
        for (std::int64_t tc : call_times) {
            if (tc > end && tc - end <= kCallWindowSeconds) {
                hit = true;
                break;
            }
        }
        obs.session.call_within_6h = hit;
    }
}

Dataset generate_population(const GenConfig& cfg) {
    cfg.validate();
    Dataset ds;
    ds.config = cfg;
    ds.vocab = make_event_vocab(cfg);

    for (std::size_t id = 0; id < cfg.n_customers; ++id) {
        Rng rng = Rng::for_stream(cfg.seed, id);
        const bool is_test = rng.uniform() < cfg.test_fraction;
        CustomerHistory history = simulate_customer(cfg, static_cast<std::int64_t>(id), rng);
        if (is_test) {
            ds.test.push_back(std::move(history));
            continue;
        }
        const std::size_t n = history.observations.size();
        std::size_t n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(n));
        if (n_val + 3 > n) n_val = n > 3 ? n - 3 : 0;
        CustomerHistory train_part;
        train_part.customer_id = history.customer_id;
        train_part.observations.assign(history.observations.begin(),
                                       history.observations.end() - static_cast<std::ptrdiff_t>(n_val));
        ds.train.push_back(std::move(train_part));
        if (n_val > 0) {
            CustomerHistory val_part;
            val_part.customer_id = history.customer_id;
            val_part.observations.assign(history.observations.end() - static_cast<std::ptrdiff_t>(n_val),
                                         history.observations.end());
            ds.val.push_back(std::move(val_part));
        }
    }
    validate_dataset(ds);
    return ds;
}

}  // namespace dce

#include "dce/data.hpp"

#include <cmath>
#include <set>

#include "dce/errors.hpp"

namespace dce {

const std::array<std::string, kNumIntents>& intent_names() {
    static const std::array<std::string, kNumIntents> names = {
        "Credit Report",
        "Deposit",
        "Overdraft Settings",
        "Bank Transactions",
        "Account Summary",
        "Transaction Management",
        "Statements and Documents",
        "Activate",
        "Redeem with bank",
        "Non Purchase Transaction",
        "Alter Production Terms",
        "Payment",
        "Authorized User",
        "Replace Card",
        "Checks",
        "Account Update",
    };
    return names;
}

int intent_index(const std::string& name) {
    const auto& names = intent_names();
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
    return -1;
}

const std::vector<ContextCategory>& context_categories() {
    static const std::vector<ContextCategory> cats = {
        {"posted_transactions", kCtxPostedTransactions, 10},
        {"transaction_authorization", kCtxTransactionAuthorization, 47},
        {"account", kCtxAccount, 29},
        {"utilization", kCtxUtilization, 20},
        {"payments", kCtxPayments, 12},
        {"rewards", kCtxRewards, 10},
        {"digital_messaging", kCtxDigitalMessaging, 6},
        {"fraud", kCtxFraud, 2},
    };
    return cats;
}

std::size_t Dataset::total_sessions() const {
    std::size_t n = 0;
    for (const auto& h : train) n += h.size();
    for (const auto& h : val) n += h.size();
    for (const auto& h : test) n += h.size();
    return n;
}

void validate_history(const CustomerHistory& history, std::size_t vocab_size) {
    std::int64_t prev_login = INT64_MIN;
    for (const Observation& obs : history.observations) {
        const Session& s = obs.session;
        if (s.customer_id != history.customer_id)
            throw AlignmentError("history: session customer id mismatch");
        if (s.t_login <= prev_login)
            throw AlignmentError("history: login timestamps must strictly increase");
        prev_login = s.t_login;
        if (s.events.empty()) throw EmptyInputError("history: session has no events");
        if (s.events.front().id != kEventLogin || s.events.front().t != s.t_login)
            throw AlignmentError("history: first event must be the login marker at t_login");
        std::int64_t prev_t = s.t_login - 1;
        for (const Event& e : s.events) {
            if (e.id < 0 || static_cast<std::size_t>(e.id) >= vocab_size)
                throw VocabError("history: event id outside vocabulary");
            if (e.t <= prev_t) throw AlignmentError("history: event timestamps must strictly increase");
            prev_t = e.t;
        }
        if (s.intents.empty()) throw AlignmentError("history: intent set must be non-empty");
        for (int intent : s.intents)
            if (intent < 0 || intent >= static_cast<int>(kNumIntents))
                throw IndexError("history: intent index out of range");
        if (obs.context.size() != kContextDim)
            throw DimensionError("history: context must have width 136");
        for (double v : obs.context)
            if (!std::isfinite(v)) throw NumericError("history: non-finite context value");
    }
}

void validate_dataset(const Dataset& ds) {
    const std::size_t m = ds.vocab.size();
    std::set<std::int64_t> train_ids;
    for (const auto& h : ds.train) {
        validate_history(h, m);
        train_ids.insert(h.customer_id);
    }
    for (const auto& h : ds.val) {
        validate_history(h, m);
        if (!train_ids.count(h.customer_id))
            throw AlignmentError("dataset: val history for a non-train customer");
    }
    for (const auto& h : ds.test) {
        validate_history(h, m);
        if (train_ids.count(h.customer_id))
            throw AlignmentError("dataset: test customer also present in train");
    }
    // Val sessions of a customer must all come after that customer's train
    // sessions.
    for (const auto& vh : ds.val) {
        for (const auto& th : ds.train) {
            if (th.customer_id != vh.customer_id || th.observations.empty() ||
                vh.observations.empty())
                continue;
            if (vh.observations.front().session.t_login <=
                th.observations.back().session.t_login)
                throw AlignmentError("dataset: val sessions must follow train sessions in time");
        }
    }
}

CalendarFields calendar_from_epoch(std::int64_t epoch_seconds) {
    // Civil-from-days (proleptic Gregorian, UTC).
    std::int64_t days = epoch_seconds / 86400;
    if (epoch_seconds % 86400 < 0) --days;

    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t dom = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t month_civil = mp < 10 ? mp + 3 : mp - 9;  // 1..12

    CalendarFields cal;
    cal.day_of_week = static_cast<int>(((days % 7) + 7 + 3) % 7);  // epoch day 0 is a Thursday
    cal.day_of_month = static_cast<int>(dom);
    cal.week_of_month = static_cast<int>((dom - 1) / 7);
    cal.month = static_cast<int>(month_civil - 1);
    return cal;
}

}  // namespace dce

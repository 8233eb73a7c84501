#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dce/gen_config.hpp"

namespace dce {

// ---------------------------------------------------------------------------
// Intent classes (fixed order; label matrices use these columns).

inline constexpr std::size_t kNumIntents = 16;

const std::array<std::string, kNumIntents>& intent_names();
int intent_index(const std::string& name);  // -1 when unknown

inline constexpr int kIntentAccountSummary = 4;
inline constexpr int kIntentPayment = 11;

// ---------------------------------------------------------------------------
// Financial context layout: 136 features in 8 named categories.

inline constexpr std::size_t kContextDim = 136;

struct ContextCategory {
    std::string name;
    std::size_t offset;
    std::size_t width;
};

const std::vector<ContextCategory>& context_categories();

// Offsets of the category blocks, fixed by the layout above.
inline constexpr std::size_t kCtxPostedTransactions = 0;
inline constexpr std::size_t kCtxTransactionAuthorization = 10;
inline constexpr std::size_t kCtxAccount = 57;
inline constexpr std::size_t kCtxUtilization = 86;
inline constexpr std::size_t kCtxPayments = 106;
inline constexpr std::size_t kCtxRewards = 118;
inline constexpr std::size_t kCtxDigitalMessaging = 128;
inline constexpr std::size_t kCtxFraud = 134;

using FinancialContext = std::vector<double>;  // length kContextDim

// ---------------------------------------------------------------------------
// Core records

struct Event {
    int id = 0;
    std::int64_t t = 0;  // epoch seconds
};

// One digital session: login-to-logout event sequence plus task labels.
struct Session {
    std::int64_t customer_id = 0;
    std::int64_t t_login = 0;
    std::vector<Event> events;        // first event is the login marker at t_login
    std::vector<int> intents;         // non-empty, sorted intent indices
    bool fraud = false;
    bool call_within_6h = false;

    std::int64_t t_end() const { return events.empty() ? t_login : events.back().t; }
};

struct Observation {
    Session session;
    FinancialContext context;  // snapshot taken at login, before any actions
};

struct CustomerHistory {
    std::int64_t customer_id = 0;
    std::vector<Observation> observations;  // strictly increasing t_login

    std::size_t size() const { return observations.size(); }
};

// ---------------------------------------------------------------------------
// Event vocabulary

struct EventVocab {
    std::vector<std::string> names;  // ids are dense 0..m-1

    std::size_t size() const { return names.size(); }
};

inline constexpr int kEventLogin = 0;
inline constexpr int kEventLogout = 1;

// ---------------------------------------------------------------------------
// Dataset: train/val/test splits. Test customers are disjoint from train;
// a validation history holds the later sessions of a train customer.

struct Dataset {
    GenConfig config;
    EventVocab vocab;
    std::vector<CustomerHistory> train;
    std::vector<CustomerHistory> val;
    std::vector<CustomerHistory> test;

    std::size_t total_sessions() const;
};

// Throws on invariant violations (ordering, context width, event ids).
void validate_history(const CustomerHistory& history, std::size_t vocab_size);
void validate_dataset(const Dataset& ds);

// ---------------------------------------------------------------------------
// Calendar fields derived from a login timestamp (UTC civil calendar).

struct CalendarFields {
    int day_of_week = 0;    // 0 = Monday .. 6 = Sunday
    int week_of_month = 0;  // (day_of_month - 1) / 7, 0..4
    int month = 0;          // 0..11
    int day_of_month = 1;   // 1..31
};

CalendarFields calendar_from_epoch(std::int64_t epoch_seconds);

}  // namespace dce

#pragma once

#include <cstdint>

namespace dce {

// Knobs of the synthetic population generator. Every distribution the
// generator uses is parameterized here so experiments can vary them without
// touching generator code. The seed fully determines the output.
struct GenConfig {
    std::uint64_t seed = 42;
    std::size_t n_customers = 2000;

    // Sessions per customer: shift + negative binomial, mean ~= mean_sessions.
    double mean_sessions = 30.0;
    std::size_t min_sessions = 5;

    // Event vocabulary size (login/logout markers + per-intent motifs +
    // generic browse events).
    std::size_t event_vocab_size = 60;
    std::size_t n_intents = 16;

    // Label rates.
    double fraud_rate = 0.01;       // per-session injection probability (i >= 2)
    double call_rate = 0.05;        // target marginal rate of 6h-call labels
    double aimless_rate = 0.08;     // sessions with no clear intent

    // Inter-login gap: log-normal in days.
    double gap_median_days = 2.0;
    double gap_sigma = 0.9;

    // Splits: test by customer, validation by time within train customers.
    double test_fraction = 0.2;
    double val_fraction = 0.15;

    // Validates ranges; throws ConfigError on violation.
    void validate() const;
};

}  // namespace dce

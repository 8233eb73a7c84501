#pragma once

#include <cstdint>
#include <vector>

#include "dce/data.hpp"
#include "dce/gen_config.hpp"

namespace dce {

// Calls count toward a session when they land in (t_end, t_end + 6h].
inline constexpr std::int64_t kCallWindowSeconds = 21600;

// Event ids 0/1 are the login/logout markers, each intent owns three motif
// page events, and the remaining ids are generic browse pages.
EventVocab make_event_vocab(const GenConfig& cfg);

// Owning intent of a motif event id, -1 for marker/browse events.
int intent_of_event(int event_id);

// Intent labels derived from the pages visited: sorted unique owning intents
// of the session's motif events. Sessions that only browsed default to
// Account Summary.
std::vector<int> label_intents(const std::vector<Event>& events);

// Rewrites call_within_6h on every session from the customer's call times.
void attach_call_labels(CustomerHistory& history,
                        const std::vector<std::int64_t>& call_times);

// Simulates the population and splits it. Test customers are held out whole;
// each remaining customer contributes its earliest sessions to train and the
// tail to validation. Output is a pure function of cfg.
Dataset generate_population(const GenConfig& cfg);

}  // namespace dce

#pragma once

// Bridges the synthetic world and the model: turns a user's history plus a
// target item into the model's input sequence.

#include <cstdint>
#include <vector>

#include "prefforge/model.hpp"
#include "prefforge/rng.hpp"
#include "prefforge/world.hpp"

namespace prefforge {

// Builds the scoring sequence for (user, target).  History entries are
// presented in an order derived from `order_seed` so the model cannot rely on
// generation order.  `skip_entry` drops one history entry (leave-one-out
// training targets); -1 keeps all.  `max_entries` truncates the shuffled
// history (history-length sweeps); -1 keeps all.
inline SequenceSpec make_sequence(const World& w, int user_id,
                                  const std::vector<double>& target_features,
                                  std::uint64_t order_seed, int skip_entry = -1,
                                  int max_entries = -1) {
    const auto& hist = w.histories.at(static_cast<std::size_t>(w.user(user_id).id));
    std::vector<int> order;
    order.reserve(hist.size());
    for (int e = 0; e < static_cast<int>(hist.size()); ++e)
        if (e != skip_entry) order.push_back(e);
    Rng rng(order_seed);
    rng.shuffle(order);
    if (max_entries >= 0 && static_cast<int>(order.size()) > max_entries)
        order.resize(static_cast<std::size_t>(max_entries));

    SequenceSpec seq;
    seq.history.reserve(order.size());
    for (int e : order) {
        const HistoryEntry& h = hist[static_cast<std::size_t>(e)];
        seq.history.emplace_back(w.item(h.pos_item).features, w.item(h.neg_item).features);
    }
    seq.target = target_features;
    return seq;
}

}  // namespace prefforge

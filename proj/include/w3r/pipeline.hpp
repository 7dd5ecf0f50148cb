#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "w3r/scoring.hpp"
#include "w3r/snapshot.hpp"
#include "w3r/walk_engine.hpp"

namespace w3r {

struct QueryConfig {
    WalkConfig walk;
    DecayConfig decay;
    CircleConfig circle;
    BetaMode betaMode = BetaMode::Precomputed;
};

class ColdStartError : public std::runtime_error {
public:
    explicit ColdStartError(const std::string& user)
        : std::runtime_error("user '" + user + "' has no affinity edges and an empty circle of trust") {}
};

struct QueryResult {
    CircleOfTrust circle;
    WalkSet walks;
    RankedList ranked;

    bool coldStart() const { return walks.empty(); }
};

//! Circle of trust, walks and ranking for one user. A cold-start user gets
//! an empty result rather than an exception.
inline QueryResult recommend(const GraphSnapshot& snap, std::string_view user, const QueryConfig& cfg) {
    auto idx = snap.userIndex(user);
    if (!idx) throw std::invalid_argument("unknown user '" + std::string(user) + "'");
    QueryResult out{computeCircleOfTrust(snap, *idx, cfg.circle), WalkSet(snap.userIds(), snap.itemIds(), *idx), {}};
    out.walks = runSalsa(snap, *idx, cfg.walk, out.circle);
    out.ranked = rankItems(out.walks, cfg.decay, cfg.betaMode);
    out.ranked.queryUser = std::string(user);
    return out;
}

} // namespace w3r

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "w3r/metrics.hpp"
#include "w3r/pipeline.hpp"
#include "w3r/rng.hpp"
#include "w3r/trust_network.hpp"

namespace w3r {

enum class AttackStrategy { Linear, Parallel, Giga };

inline std::string_view toString(AttackStrategy s) {
    switch (s) {
    case AttackStrategy::Linear: return "linear";
    case AttackStrategy::Parallel: return "parallel";
    case AttackStrategy::Giga: return "giga";
    }
    return "?";
}

inline AttackStrategy parseStrategy(std::string_view s) {
    if (s == "linear") return AttackStrategy::Linear;
    if (s == "parallel") return AttackStrategy::Parallel;
    if (s == "giga") return AttackStrategy::Giga;
    throw std::invalid_argument("unknown attack strategy '" + std::string(s) + "'");
}

struct AttackSpec {
    AttackStrategy strategy = AttackStrategy::Linear;
    std::string traitor;              //!< Linear and Parallel
    std::size_t sybilCount = 1;       //!< S, Linear and Parallel
    double sybilFraction = 0.0;       //!< Giga
    std::size_t sybilItemsPerSybil = 1;
    Timestamp timestamp = 0;          //!< 0 -> one past the newest edge
    std::uint64_t rngSeed = 0;        //!< Giga user selection

    void validate() const {
        if (sybilItemsPerSybil == 0) throw std::invalid_argument("sybilItemsPerSybil must be positive");
        if (timestamp < 0) throw std::invalid_argument("attack timestamp must be positive");
        if (strategy == AttackStrategy::Giga) {
            if (!(sybilFraction > 0.0 && sybilFraction < 1.0)) {
                throw std::invalid_argument("sybilFraction must lie in (0,1)");
            }
        } else {
            if (traitor.empty()) throw std::invalid_argument("attack needs a traitor");
            if (sybilCount == 0) throw std::invalid_argument("sybil count must be positive");
        }
    }
};

struct SybilLedger {
    std::set<std::string> sybilUsers; //!< users controlled by the attacker, new or converted
    std::set<std::string> sybilItems;

    bool empty() const { return sybilUsers.empty() && sybilItems.empty(); }
};

struct AttackOutcome {
    TrustNetwork network;
    SybilLedger ledger;
};

namespace detail {

inline std::string padded(std::size_t k, std::size_t width) {
    std::string d = std::to_string(k);
    return std::string(width > d.size() ? width - d.size() : 0, '0') + d;
}

inline std::string freshUserId(const TrustNetwork& net, std::string base) {
    while (net.hasUser(base)) base += '_';
    return base;
}

inline std::string freshItemId(const TrustNetwork& net, std::string base) {
    while (net.hasItem(base)) base += '_';
    return base;
}

inline Timestamp attackTime(const TrustNetwork& net, const AttackSpec& spec) {
    return spec.timestamp > 0 ? spec.timestamp : net.maxTimestamp() + 1;
}

inline void requireTraitor(const TrustNetwork& net, const std::string& traitor) {
    if (!net.hasUser(traitor)) throw std::invalid_argument("unknown traitor '" + traitor + "'");
    bool trusted = false;
    for (const auto& [uid, rec] : net.users()) {
        if (uid != traitor && rec.trust.count(traitor)) {
            trusted = true;
            break;
        }
    }
    if (!trusted) throw std::invalid_argument("traitor '" + traitor + "' has no inbound trust edge");
    if (net.users().at(traitor).affinity.empty()) {
        throw std::invalid_argument("traitor '" + traitor + "' has no affinity edges to bridge from");
    }
}

//! The traitor's strongest item, ties broken by item id.
inline std::string bridgeItem(const TrustNetwork& net, const std::string& traitor) {
    const auto& aff = net.users().at(traitor).affinity;
    auto best = aff.begin();
    for (auto it = aff.begin(); it != aff.end(); ++it) {
        if (it->second.weight > best->second.weight) best = it;
    }
    return best->first;
}

inline void publishAffinity(TrustNetwork& net, const std::string& user, const std::vector<std::string>& items,
                            Timestamp ts) {
    const double w = 1.0 / static_cast<double>(items.size());
    for (const auto& item : items) net.merge(TimedEdge{NodeId::user(user), NodeId::item(item), w, ts});
}

inline std::vector<std::string> sybilUsers(const TrustNetwork& net, const std::string& traitor, std::size_t count) {
    const std::size_t width = std::to_string(count).size();
    std::vector<std::string> ids;
    for (std::size_t k = 1; k <= count; ++k) {
        ids.push_back(freshUserId(net, "sybil-" + traitor + "-u" + padded(k, width)));
    }
    return ids;
}

inline std::vector<std::string> sybilItems(const TrustNetwork& net, const std::string& owner, std::size_t count) {
    const std::size_t width = std::to_string(count).size();
    std::vector<std::string> ids;
    for (std::size_t k = 1; k <= count; ++k) {
        ids.push_back(freshItemId(net, "sybil-" + owner + "-i" + padded(k, width)));
    }
    return ids;
}

} // namespace detail

//! Chain traitor -> s1 -> ... -> sS of weight-1 trust edges. Each Sybil owns
//! sybilItemsPerSybil fresh items and also endorses the traitor's strongest
//! item and every item of its predecessors, so a trusted walk that reaches
//! s_k can always continue to s_{k+1}. Affinities are uniform.
inline AttackOutcome mountLinearAttack(TrustNetwork net, const AttackSpec& spec) {
    spec.validate();
    detail::requireTraitor(net, spec.traitor);
    const Timestamp ts = detail::attackTime(net, spec);
    AttackOutcome out{std::move(net), {}};
    TrustNetwork& n = out.network;

    const auto users = detail::sybilUsers(n, spec.traitor, spec.sybilCount);
    std::vector<std::string> held{detail::bridgeItem(n, spec.traitor)};
    std::string prev = spec.traitor;
    for (const auto& s : users) {
        const auto own = detail::sybilItems(n, s, spec.sybilItemsPerSybil);
        held.insert(held.end(), own.begin(), own.end());
        n.setTrust(NodeId::user(prev), NodeId::user(s), 1.0, ts);
        detail::publishAffinity(n, s, held, ts);
        out.ledger.sybilUsers.insert(s);
        out.ledger.sybilItems.insert(own.begin(), own.end());
        prev = s;
    }
    return out;
}

//! Traitor trusts S sibling Sybils (weight 1; the fanout cap keeps the last
//! K by id and may evict the traitor's honest edges). Every Sybil endorses
//! the traitor's strongest item plus one shared pool of sybilItemsPerSybil
//! Sybil items, and trusts the next K Sybils around a ring.
inline AttackOutcome mountParallelAttack(TrustNetwork net, const AttackSpec& spec) {
    spec.validate();
    detail::requireTraitor(net, spec.traitor);
    const Timestamp ts = detail::attackTime(net, spec);
    AttackOutcome out{std::move(net), {}};
    TrustNetwork& n = out.network;

    const auto users = detail::sybilUsers(n, spec.traitor, spec.sybilCount);
    const auto pool = detail::sybilItems(n, "sybil-" + spec.traitor + "-pool", spec.sybilItemsPerSybil);
    std::vector<std::string> held{detail::bridgeItem(n, spec.traitor)};
    held.insert(held.end(), pool.begin(), pool.end());
    for (const auto& s : users) {
        n.setTrust(NodeId::user(spec.traitor), NodeId::user(s), 1.0, ts);
        detail::publishAffinity(n, s, held, ts);
    }
    const std::size_t ring = std::min(n.limits().trustFanout, users.size() - 1);
    for (std::size_t j = 0; j < users.size(); ++j) {
        for (std::size_t d = 1; d <= ring; ++d) {
            n.setTrust(NodeId::user(users[j]), NodeId::user(users[(j + d) % users.size()]), 1.0, ts);
        }
    }
    out.ledger.sybilUsers.insert(users.begin(), users.end());
    out.ledger.sybilItems.insert(pool.begin(), pool.end());
    return out;
}

//! Converts floor(f * |U|) uniformly chosen users. Each keeps its honest
//! items at half their former weight (the bridge honest walks cross), puts
//! the other half uniformly on sybilItemsPerSybil fresh items, and trusts the
//! next K converted users around a ring. Honest trust into converted users
//! is retained.
inline AttackOutcome mountGigaAttack(TrustNetwork net, const AttackSpec& spec) {
    spec.validate();
    const std::size_t count =
        static_cast<std::size_t>(std::floor(spec.sybilFraction * static_cast<double>(net.userCount()) + 1e-9));
    if (count == 0) throw std::invalid_argument("sybil fraction converts no users");
    const Timestamp ts = detail::attackTime(net, spec);

    std::vector<std::string> all;
    for (const auto& [uid, rec] : net.users()) all.push_back(uid);
    Rng rng(spec.rngSeed, rng_domain::kAttack, 0);
    for (std::size_t k = 0; k < count; ++k) std::swap(all[k], all[k + rng.below(all.size() - k)]);
    std::vector<std::string> converted(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(converted.begin(), converted.end());

    AttackOutcome out{std::move(net), {}};
    TrustNetwork& n = out.network;
    for (const auto& g : converted) {
        std::vector<std::pair<std::string, double>> honest;
        for (const auto& [iid, link] : n.users().at(g).affinity) honest.emplace_back(iid, link.weight);
        const auto fresh = detail::sybilItems(n, g, spec.sybilItemsPerSybil);
        const double share = honest.empty() ? 1.0 : 0.5;
        for (const auto& [iid, w] : honest) {
            n.merge(TimedEdge{NodeId::user(g), NodeId::item(iid), w * (1.0 - share), ts});
        }
        for (const auto& item : fresh) {
            n.merge(TimedEdge{NodeId::user(g), NodeId::item(item), share / static_cast<double>(fresh.size()), ts});
        }
        out.ledger.sybilItems.insert(fresh.begin(), fresh.end());
    }
    const std::size_t ring = std::min(n.limits().trustFanout, converted.size() - 1);
    for (std::size_t j = 0; j < converted.size(); ++j) {
        for (std::size_t d = 1; d <= ring; ++d) {
            n.setTrust(NodeId::user(converted[j]), NodeId::user(converted[(j + d) % converted.size()]), 1.0, ts);
        }
    }
    out.ledger.sybilUsers.insert(converted.begin(), converted.end());
    return out;
}

inline AttackOutcome mountAttack(TrustNetwork net, const AttackSpec& spec) {
    switch (spec.strategy) {
    case AttackStrategy::Linear: return mountLinearAttack(std::move(net), spec);
    case AttackStrategy::Parallel: return mountParallelAttack(std::move(net), spec);
    case AttackStrategy::Giga: return mountGigaAttack(std::move(net), spec);
    }
    throw std::invalid_argument("unknown attack strategy");
}

//! Sum of s[i] over the ledger's Sybil items.
inline double sybilScore(const RankedList& ranked, const SybilLedger& ledger) {
    double total = 0.0;
    for (const auto& e : ranked.entries) {
        if (ledger.sybilItems.count(e.item)) total += e.score;
    }
    return total;
}

struct GainRow {
    AttackStrategy strategy = AttackStrategy::Linear;
    std::size_t sybilCount = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double tauBeta = 0.0;
    double meanSybilScore = 0.0;
    double meanSitr100 = 0.0;
    std::vector<double> perQuery; //!< Sybil score per query user, input order
};

struct GainReport {
    std::vector<GainRow> rows;

    std::string toCsv() const {
        std::string out = "strategy,S,alpha,beta,tauBeta,meanSybilScore,meanSITR100\n";
        for (const auto& r : rows) {
            out += std::string(toString(r.strategy)) + ',' + std::to_string(r.sybilCount) + ',' + formatWeight(r.alpha) +
                   ',' + formatWeight(r.beta) + ',' + formatWeight(r.tauBeta) + ',' + formatWeight(r.meanSybilScore) +
                   ',' + formatWeight(r.meanSitr100) + '\n';
        }
        return out;
    }
};

//! For each config, the mean over query users of the cumulative Sybil score
//! and SITR(100) in `after`. Query users must exist in both networks. Walks
//! are shared between configs that differ only in their decay settings.
inline GainReport measureAttackGain(const TrustNetwork& before, const TrustNetwork& after, const SybilLedger& ledger,
                                    const std::vector<std::string>& queryUsers, const std::vector<QueryConfig>& cfgs,
                                    AttackStrategy strategy, std::size_t sybilCount) {
    for (const auto& q : queryUsers) {
        if (!before.hasUser(q) || !after.hasUser(q)) {
            throw std::invalid_argument("query user '" + q + "' missing from a network");
        }
    }
    GainReport report;
    for (const auto& cfg : cfgs) {
        GainRow row{strategy, sybilCount, cfg.walk.alphaDecay, cfg.decay.betaDecay, cfg.decay.betaThreshold, 0.0, 0.0, {}};
        row.perQuery.assign(queryUsers.size(), 0.0);
        report.rows.push_back(row);
    }
    if (queryUsers.empty() || ledger.sybilItems.empty()) return report;

    const GraphSnapshot snap(after);
    for (std::size_t q = 0; q < queryUsers.size(); ++q) {
        const NodeIndex idx = *snap.userIndex(queryUsers[q]);
        std::vector<std::pair<WalkConfig, WalkSet>> cache;
        CircleOfTrust circle;
        bool haveCircle = false;
        for (std::size_t c = 0; c < cfgs.size(); ++c) {
            const auto& cfg = cfgs[c];
            if (!haveCircle) {
                circle = computeCircleOfTrust(snap, idx, cfg.circle);
                haveCircle = true;
            }
            auto hit = std::find_if(cache.begin(), cache.end(), [&](const auto& e) {
                const auto& w = e.first;
                return w.alphaDecay == cfg.walk.alphaDecay && w.walkCount == cfg.walk.walkCount &&
                       w.maxSteps == cfg.walk.maxSteps && w.rngSeed == cfg.walk.rngSeed &&
                       w.seedRampD0 == cfg.walk.seedRampD0 && w.vanilla == cfg.walk.vanilla;
            });
            if (hit == cache.end()) {
                cache.emplace_back(cfg.walk, runSalsa(snap, idx, cfg.walk, circle));
                hit = std::prev(cache.end());
            }
            const RankedList ranked = rankItems(hit->second, cfg.decay, cfg.betaMode);
            const double score = sybilScore(ranked, ledger);
            report.rows[c].perQuery[q] = score;
            report.rows[c].meanSybilScore += score;
            report.rows[c].meanSitr100 += static_cast<double>(sitr(ranked, ledger.sybilItems, 100));
        }
    }
    for (auto& r : report.rows) {
        r.meanSybilScore /= static_cast<double>(queryUsers.size());
        r.meanSitr100 /= static_cast<double>(queryUsers.size());
    }
    return report;
}

} // namespace w3r

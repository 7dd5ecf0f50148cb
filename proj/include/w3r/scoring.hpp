#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "w3r/walk_engine.hpp"

namespace w3r {

struct DecayConfig {
    double betaDecay = 0.0;     //!< beta: discount applied to detected items
    double betaThreshold = 0.5; //!< tau_beta: diversity above which an item is decayed

    void validate() const {
        if (!(betaDecay >= 0.0 && betaDecay <= 1.0)) throw std::invalid_argument("beta decay must lie in [0,1]");
        if (!(betaThreshold > 0.0 && betaThreshold <= 1.0)) {
            throw std::invalid_argument("beta threshold must lie in (0,1]");
        }
    }
};

//! Precomputed materializes per-(item, user) precedence counts in a single
//! pass; OnTheFly processes one item at a time with a reused buffer.
enum class BetaMode { Precomputed, OnTheFly };

struct RankedEntry {
    std::string item;
    double score = 0.0;      //!< s[i]
    double betaFactor = 1.0; //!< b[i]
    std::size_t walkCount = 0; //!< |R(i)|

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    std::string queryUser;
    std::vector<RankedEntry> entries;

    std::optional<std::size_t> rankOf(std::string_view item) const {
        for (std::size_t r = 0; r < entries.size(); ++r) {
            if (entries[r].item == item) return r;
        }
        return std::nullopt;
    }

    std::vector<std::string> itemOrder() const {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.item);
        return out;
    }

    bool operator==(const RankedList&) const = default;
};

namespace detail {

inline std::optional<std::size_t> firstItemPosition(std::span<const NodeIndex> walk, NodeIndex item) {
    for (std::size_t p = 1; p < walk.size(); p += 2) {
        if (walk[p] == item) return p;
    }
    return std::nullopt;
}

inline bool userBefore(std::span<const NodeIndex> walk, NodeIndex user, std::size_t end, bool excludeStart) {
    if (excludeStart && walk[0] == user) return false;
    for (std::size_t p = 0; p < end; p += 2) {
        if (walk[p] == user) return true;
    }
    return false;
}

inline bool exceeds(std::size_t count, std::size_t total, double threshold) {
    return static_cast<double>(count) / static_cast<double>(total) > threshold;
}

} // namespace detail

//! div(u, i): share of the walks containing `item` in which `user` appears
//! before the item's first occurrence. 0 when no walk contains the item.
//! With `excludeStart`, a walk's start user never counts as a predecessor.
inline double computeDiversity(const WalkSet& walks, NodeIndex item, NodeIndex user, bool excludeStart = false) {
    std::size_t containing = 0;
    std::size_t preceded = 0;
    for (std::size_t k = 0; k < walks.size(); ++k) {
        auto walk = walks.walk(k);
        auto pos = detail::firstItemPosition(walk, item);
        if (!pos) continue;
        ++containing;
        if (detail::userBefore(walk, user, *pos, excludeStart)) ++preceded;
    }
    return containing == 0 ? 0.0 : static_cast<double>(preceded) / static_cast<double>(containing);
}

namespace detail {

struct ItemTally {
    std::vector<std::size_t> containing; //!< |R(i)| per item index
    std::vector<bool> decayed;
};

inline ItemTally tallyPrecomputed(const WalkSet& walks, const DecayConfig& cfg) {
    ItemTally tally;
    tally.containing.assign(walks.itemCount(), 0);
    tally.decayed.assign(walks.itemCount(), false);
    std::unordered_map<std::uint64_t, std::size_t> precedence; // (item << 32 | user) -> walks
    std::vector<NodeIndex> seenUsers, seenItems;
    for (std::size_t k = 0; k < walks.size(); ++k) {
        auto walk = walks.walk(k);
        seenUsers.clear();
        seenItems.clear();
        for (std::size_t p = 1; p < walk.size(); ++p) {
            const NodeIndex node = walk[p];
            if (p % 2 == 0) {
                if (node != walk[0] && std::find(seenUsers.begin(), seenUsers.end(), node) == seenUsers.end()) {
                    seenUsers.push_back(node);
                }
                continue;
            }
            if (std::find(seenItems.begin(), seenItems.end(), node) != seenItems.end()) continue;
            seenItems.push_back(node);
            ++tally.containing[node];
            for (NodeIndex u : seenUsers) ++precedence[(std::uint64_t{node} << 32) | u];
        }
    }
    for (const auto& [key, count] : precedence) {
        const auto item = static_cast<NodeIndex>(key >> 32);
        if (exceeds(count, tally.containing[item], cfg.betaThreshold)) tally.decayed[item] = true;
    }
    return tally;
}

inline ItemTally tallyOnTheFly(const WalkSet& walks, const DecayConfig& cfg) {
    ItemTally tally;
    tally.containing.assign(walks.itemCount(), 0);
    tally.decayed.assign(walks.itemCount(), false);
    // One counter per user, reset between items via the touched list.
    std::vector<std::size_t> counter(walks.userCount(), 0);
    std::vector<NodeIndex> touched;
    for (NodeIndex item = 0; item < walks.itemCount(); ++item) {
        std::size_t containing = 0;
        for (std::size_t k = 0; k < walks.size(); ++k) {
            auto walk = walks.walk(k);
            auto pos = firstItemPosition(walk, item);
            if (!pos) continue;
            ++containing;
            for (std::size_t p = 2; p < *pos; p += 2) {
                const NodeIndex u = walk[p];
                if (u == walk[0]) continue;
                bool earlier = false;
                for (std::size_t q = 2; q < p; q += 2) {
                    if (walk[q] == u) {
                        earlier = true;
                        break;
                    }
                }
                if (earlier) continue;
                if (counter[u]++ == 0) touched.push_back(u);
            }
        }
        tally.containing[item] = containing;
        for (NodeIndex u : touched) {
            if (containing > 0 && exceeds(counter[u], containing, cfg.betaThreshold)) tally.decayed[item] = true;
            counter[u] = 0;
        }
        touched.clear();
    }
    return tally;
}

inline ItemTally tally(const WalkSet& walks, const DecayConfig& cfg, BetaMode mode) {
    cfg.validate();
    return mode == BetaMode::Precomputed ? tallyPrecomputed(walks, cfg) : tallyOnTheFly(walks, cfg);
}

} // namespace detail

//! b[i] for every visited item: 1 - beta if some user other than the walk
//! start has diversity above tau_beta for the item, else 1.
inline std::map<std::string, double> computeBetaFactors(const WalkSet& walks, const DecayConfig& cfg,
                                                        BetaMode mode = BetaMode::Precomputed) {
    const auto t = detail::tally(walks, cfg, mode);
    std::map<std::string, double> factors;
    for (NodeIndex i = 0; i < walks.itemCount(); ++i) {
        if (t.containing[i] > 0) factors.emplace(walks.itemId(i), t.decayed[i] ? 1.0 - cfg.betaDecay : 1.0);
    }
    return factors;
}

//! s[i] = |R(i)| / sum_x |R(x)| * b[i], sorted by descending score then item id.
inline RankedList rankItems(const WalkSet& walks, const DecayConfig& cfg, BetaMode mode = BetaMode::Precomputed) {
    RankedList ranked;
    if (auto q = walks.queryUser()) ranked.queryUser = walks.userId(*q);
    const auto t = detail::tally(walks, cfg, mode);
    std::size_t total = 0;
    for (auto c : t.containing) total += c;
    if (total == 0) return ranked;
    for (NodeIndex i = 0; i < walks.itemCount(); ++i) {
        if (t.containing[i] == 0) continue;
        const double b = t.decayed[i] ? 1.0 - cfg.betaDecay : 1.0;
        ranked.entries.push_back(
            {walks.itemId(i), static_cast<double>(t.containing[i]) / static_cast<double>(total) * b, b, t.containing[i]});
    }
    std::sort(ranked.entries.begin(), ranked.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item < b.item;
    });
    return ranked;
}

//! `rank,itemId,score,betaFactor`; `topX` of 0 writes every entry.
inline std::string toCsv(const RankedList& ranked, std::size_t topX = 0) {
    std::string out = "rank,itemId,score,betaFactor\n";
    const std::size_t n = topX == 0 ? ranked.entries.size() : std::min(topX, ranked.entries.size());
    char buf[64];
    for (std::size_t r = 0; r < n; ++r) {
        const auto& e = ranked.entries[r];
        out += std::to_string(r) + ',' + e.item + ',';
        auto res = std::to_chars(buf, buf + sizeof(buf), e.score);
        out.append(buf, res.ptr);
        out += ',';
        res = std::to_chars(buf, buf + sizeof(buf), e.betaFactor);
        out.append(buf, res.ptr);
        out += '\n';
    }
    return out;
}

} // namespace w3r

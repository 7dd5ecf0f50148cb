#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "w3r/rng.hpp"
#include "w3r/snapshot.hpp"

namespace w3r {

struct WalkConfig {
    double alphaDecay = 0.0;       //!< per-step termination probability
    std::size_t walkCount = 10000; //!< W
    std::size_t maxSteps = 39;     //!< L, odd so walks can end on the item side
    std::uint64_t rngSeed = 0;
    std::size_t seedRampD0 = 10; //!< start at the query user w.p. min(1, deg/D0)
    bool vanilla = false;        //!< uniform, untrusted walks (baseline)

    void validate() const {
        if (!(alphaDecay >= 0.0 && alphaDecay < 1.0)) throw std::invalid_argument("alpha decay must lie in [0,1)");
        if (walkCount == 0) throw std::invalid_argument("walk count must be positive");
        if (maxSteps == 0 || maxSteps % 2 == 0) throw std::invalid_argument("max steps must be a positive odd number");
        if (seedRampD0 == 0) throw std::invalid_argument("seed ramp D0 must be positive");
    }
};

//! Recorded SALSA walks for one query. Node kinds alternate User, Item,
//! User, ... so a walk is stored as plain indices: even positions index
//! users, odd positions index items.
class WalkSet {
public:
    using IdTable = std::shared_ptr<const std::vector<std::string>>;

    WalkSet() : userIds_(std::make_shared<std::vector<std::string>>()), itemIds_(userIds_) {}
    WalkSet(IdTable userIds, IdTable itemIds, std::optional<NodeIndex> queryUser)
        : userIds_(std::move(userIds)), itemIds_(std::move(itemIds)), query_(queryUser) {}

    void add(std::span<const NodeIndex> walk) {
        if (walk.empty()) throw std::invalid_argument("a walk starts at a user");
        for (std::size_t p = 0; p < walk.size(); ++p) {
            const std::size_t limit = p % 2 == 0 ? userIds_->size() : itemIds_->size();
            if (walk[p] >= limit) throw std::out_of_range("walk node index out of range");
        }
        nodes_.insert(nodes_.end(), walk.begin(), walk.end());
        offsets_.push_back(nodes_.size());
    }
    void add(std::initializer_list<NodeIndex> walk) { add(std::span<const NodeIndex>(walk.begin(), walk.size())); }

    std::size_t size() const { return offsets_.size() - 1; }
    bool empty() const { return size() == 0; }

    std::span<const NodeIndex> walk(std::size_t k) const {
        return std::span<const NodeIndex>(nodes_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
    }
    std::vector<std::span<const NodeIndex>> walks() const {
        std::vector<std::span<const NodeIndex>> out;
        out.reserve(size());
        for (std::size_t k = 0; k < size(); ++k) out.push_back(walk(k));
        return out;
    }

    static NodeKind kindAt(std::size_t position) { return position % 2 == 0 ? NodeKind::User : NodeKind::Item; }

    NodeId nodeAt(std::size_t k, std::size_t position) const {
        const NodeIndex idx = walk(k)[position];
        return kindAt(position) == NodeKind::User ? NodeId::user(userId(idx)) : NodeId::item(itemId(idx));
    }

    const std::string& userId(NodeIndex u) const { return (*userIds_)[u]; }
    const std::string& itemId(NodeIndex i) const { return (*itemIds_)[i]; }
    const IdTable& userIds() const { return userIds_; }
    const IdTable& itemIds() const { return itemIds_; }
    std::size_t userCount() const { return userIds_->size(); }
    std::size_t itemCount() const { return itemIds_->size(); }

    std::optional<NodeIndex> queryUser() const { return query_; }

    std::size_t totalNodes() const { return nodes_.size(); }

    bool operator==(const WalkSet& other) const {
        return *userIds_ == *other.userIds_ && *itemIds_ == *other.itemIds_ && query_ == other.query_ &&
               nodes_ == other.nodes_ && offsets_ == other.offsets_;
    }

private:
    IdTable userIds_;
    IdTable itemIds_;
    std::optional<NodeIndex> query_;
    std::vector<NodeIndex> nodes_;
    std::vector<std::size_t> offsets_{0};
};

//! One walk per line, each a JSON array of node ids.
inline std::string toJsonLines(const WalkSet& walks) {
    std::string out;
    for (std::size_t k = 0; k < walks.size(); ++k) {
        nlohmann::json line = nlohmann::json::array();
        auto walk = walks.walk(k);
        for (std::size_t p = 0; p < walk.size(); ++p) {
            line.push_back(p % 2 == 0 ? walks.userId(walk[p]) : walks.itemId(walk[p]));
        }
        out += line.dump();
        out += '\n';
    }
    return out;
}

namespace detail {

//! Cumulative-weight sampling: returns the first candidate whose running
//! weight sum reaches p = total * u, u in (0,1]. Zero-weight candidates are
//! never returned.
template <typename Candidates, typename WeightOf>
std::optional<std::size_t> sampleCumulative(const Candidates& candidates, WeightOf weightOf, Rng& rng) {
    double total = 0.0;
    for (const auto& c : candidates) total += weightOf(c);
    if (!(total > 0.0)) return std::nullopt;
    const double p = total * rng.uniformOpen01();
    double cumulative = 0.0;
    std::optional<std::size_t> lastPositive;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double w = weightOf(candidates[k]);
        if (w <= 0.0) continue;
        cumulative += w;
        lastPositive = k;
        if (p <= cumulative) return k;
    }
    return lastPositive;
}

} // namespace detail

//! User -> item step, biased by Af(user, item). nullopt is a dead end.
inline std::optional<NodeIndex> walkToItem(const GraphSnapshot& snap, NodeIndex user, Rng& rng) {
    auto items = snap.itemsOf(user);
    auto pick = detail::sampleCumulative(items, [](const WeightedLink& l) { return l.weight; }, rng);
    if (!pick) return std::nullopt;
    return items[*pick].target;
}

//! Item -> user step restricted to users that `lastUser` trusts and that have
//! an affinity edge to `item`, biased by their affinity for the item.
inline std::optional<NodeIndex> walkToUser(const GraphSnapshot& snap, NodeIndex item, NodeIndex lastUser, Rng& rng) {
    struct Candidate {
        NodeIndex user;
        double affinity;
    };
    // Fanout K keeps this tiny.
    std::vector<Candidate> candidates;
    for (const auto& t : snap.trustOf(lastUser)) {
        if (auto af = snap.affinity(t.target, item)) candidates.push_back({t.target, *af});
    }
    auto pick = detail::sampleCumulative(candidates, [](const Candidate& c) { return c.affinity; }, rng);
    if (!pick) return std::nullopt;
    return candidates[*pick].user;
}

inline std::optional<NodeIndex> walkToItemUniform(const GraphSnapshot& snap, NodeIndex user, Rng& rng) {
    auto items = snap.itemsOf(user);
    if (items.empty()) return std::nullopt;
    return items[rng.below(items.size())].target;
}

inline std::optional<NodeIndex> walkToUserUniform(const GraphSnapshot& snap, NodeIndex item, Rng& rng) {
    auto users = snap.usersOf(item);
    if (users.empty()) return std::nullopt;
    return users[rng.below(users.size())].target;
}

// ---------------------------------------------------------------------------
// Circle of trust: Monte-Carlo personalized PageRank over the trust graph.

struct CircleConfig {
    double resetProbability = 0.15; //!< c
    std::size_t segmentCount = 10000; //!< R
    std::uint64_t rngSeed = 0;
    std::size_t maxSegmentLength = 10000;

    void validate() const {
        if (!(resetProbability > 0.0 && resetProbability < 1.0)) {
            throw std::invalid_argument("reset probability must lie in (0,1)");
        }
        if (segmentCount == 0) throw std::invalid_argument("segment count must be positive");
        if (maxSegmentLength == 0) throw std::invalid_argument("max segment length must be positive");
    }
};

class CircleOfTrust {
public:
    CircleOfTrust() = default;

    const std::string& root() const { return root_; }
    bool empty() const { return scores_.empty(); }

    //! Visit-probability estimates sorted by user id; root excluded.
    const std::vector<std::pair<std::string, double>>& scores() const { return scores_; }

    double score(std::string_view user) const {
        auto it = std::lower_bound(scores_.begin(), scores_.end(), user,
                                   [](const auto& e, std::string_view u) { return e.first < u; });
        return it != scores_.end() && it->first == user ? it->second : 0.0;
    }

    const CircleConfig& config() const { return cfg_; }
    std::size_t segmentCount() const { return segments_.size(); }
    std::vector<std::string> segment(std::size_t k) const {
        std::vector<std::string> out;
        for (NodeIndex u : segments_[k]) out.push_back((*userIds_)[u]);
        return out;
    }

    bool operator==(const CircleOfTrust& other) const {
        if (root_ != other.root_ || scores_ != other.scores_ || segments_.size() != other.segments_.size()) {
            return false;
        }
        for (std::size_t k = 0; k < segments_.size(); ++k) {
            if (segment(k) != other.segment(k)) return false;
        }
        return true;
    }

private:
    friend CircleOfTrust computeCircleOfTrust(const GraphSnapshot&, NodeIndex, const CircleConfig&);
    friend CircleOfTrust updateCircleIncremental(CircleOfTrust, const GraphSnapshot&, const TimedEdge&);

    static std::optional<NodeIndex> stepTrust(const GraphSnapshot& snap, NodeIndex user, Rng& rng) {
        auto out = snap.trustOf(user);
        auto pick = detail::sampleCumulative(out, [](const WeightedLink& l) { return l.weight; }, rng);
        if (!pick) return std::nullopt;
        return out[*pick].target;
    }

    void extend(const GraphSnapshot& snap, std::size_t k) {
        Rng rng(cfg_.rngSeed, rng_domain::kCircleSegment, k, versions_[k]);
        auto& seg = segments_[k];
        while (seg.size() < cfg_.maxSegmentLength) {
            if (rng.uniform01() < cfg_.resetProbability) break;
            auto next = stepTrust(snap, seg.back(), rng);
            if (!next) break;
            seg.push_back(*next);
        }
    }

    void rescore() {
        std::map<NodeIndex, std::size_t> visits;
        std::size_t total = 0;
        for (const auto& seg : segments_) {
            for (NodeIndex u : seg) {
                if (u == rootIndex_) continue;
                ++visits[u];
                ++total;
            }
        }
        scores_.clear();
        for (const auto& [u, count] : visits) {
            scores_.emplace_back((*userIds_)[u], static_cast<double>(count) / static_cast<double>(total));
        }
        std::sort(scores_.begin(), scores_.end());
    }

    std::string root_;
    NodeIndex rootIndex_ = 0;
    CircleConfig cfg_;
    std::shared_ptr<const std::vector<std::string>> userIds_;
    std::vector<std::vector<NodeIndex>> segments_;
    std::vector<std::uint64_t> versions_;
    std::vector<std::pair<std::string, double>> scores_;
};

//! R segments from `root`; each step terminates w.p. c, else follows an
//! out-edge chosen proportionally to trust weight. score(v) is v's share of
//! all non-root visits.
inline CircleOfTrust computeCircleOfTrust(const GraphSnapshot& snap, NodeIndex root, const CircleConfig& cfg) {
    cfg.validate();
    if (root >= snap.userCount()) throw std::out_of_range("unknown circle root");
    CircleOfTrust circle;
    circle.root_ = snap.userId(root);
    circle.rootIndex_ = root;
    circle.cfg_ = cfg;
    circle.userIds_ = snap.userIds();
    circle.segments_.assign(cfg.segmentCount, std::vector<NodeIndex>{root});
    circle.versions_.assign(cfg.segmentCount, 0);
    for (std::size_t k = 0; k < cfg.segmentCount; ++k) circle.extend(snap, k);
    circle.rescore();
    return circle;
}

//! Re-samples, from their first visit of an endpoint onwards, only the
//! stored segments that touch the changed trust edge. `snap` must reflect
//! the network after the change.
inline CircleOfTrust updateCircleIncremental(CircleOfTrust circle, const GraphSnapshot& snap, const TimedEdge& changed) {
    if (!changed.isTrust()) return circle;
    if (circle.userIds_ != snap.userIds() && *circle.userIds_ != *snap.userIds()) {
        for (auto& seg : circle.segments_) {
            for (auto& u : seg) {
                auto idx = snap.userIndex((*circle.userIds_)[u]);
                if (!idx) throw std::invalid_argument("snapshot lacks a user visited by the circle");
                u = *idx;
            }
        }
        circle.rootIndex_ = *snap.userIndex(circle.root_);
    }
    circle.userIds_ = snap.userIds();

    auto src = snap.userIndex(changed.src.id);
    auto dst = snap.userIndex(changed.dst.id);
    bool touched = false;
    for (std::size_t k = 0; k < circle.segments_.size(); ++k) {
        auto& seg = circle.segments_[k];
        auto hit = std::find_if(seg.begin(), seg.end(), [&](NodeIndex u) { return u == src || u == dst; });
        if (hit == seg.end()) continue;
        seg.erase(std::next(hit), seg.end());
        ++circle.versions_[k];
        circle.extend(snap, k);
        touched = true;
    }
    if (touched) circle.rescore();
    return circle;
}

// ---------------------------------------------------------------------------
// Personalized SALSA.

//! Runs W independent walks for `query`. Each walk starts at the query user
//! w.p. min(1, deg/D0), otherwise at a user drawn from the circle of trust;
//! it alternates item/user steps, stops w.p. alpha before every step after
//! the first, and also stops on a dead end or after L steps.
inline WalkSet runSalsa(const GraphSnapshot& snap, NodeIndex query, const WalkConfig& cfg, const CircleOfTrust& circle) {
    cfg.validate();
    if (query >= snap.userCount()) throw std::out_of_range("unknown query user");
    WalkSet walks(snap.userIds(), snap.itemIds(), query);

    std::vector<NodeIndex> seedUsers;
    std::vector<double> seedWeights;
    for (const auto& [uid, score] : circle.scores()) {
        if (auto idx = snap.userIndex(uid); idx && score > 0.0) {
            seedUsers.push_back(*idx);
            seedWeights.push_back(score);
        }
    }
    const std::size_t degree = snap.itemsOf(query).size();
    if (degree == 0 && seedUsers.empty()) return walks;
    const double pUser = std::min(1.0, static_cast<double>(degree) / static_cast<double>(cfg.seedRampD0));

    std::vector<NodeIndex> walk;
    walk.reserve(cfg.maxSteps + 1);
    for (std::size_t w = 0; w < cfg.walkCount; ++w) {
        Rng rng(cfg.rngSeed, rng_domain::kSalsaWalk, w);
        walk.clear();
        NodeIndex start = query;
        if (rng.uniform01() >= pUser && !seedUsers.empty()) {
            auto pick = detail::sampleCumulative(seedWeights, [](double s) { return s; }, rng);
            start = seedUsers[*pick];
        }
        walk.push_back(start);
        NodeIndex lastUser = start;
        NodeIndex item = 0;
        for (std::size_t step = 1; step <= cfg.maxSteps; ++step) {
            if (step > 1 && rng.uniform01() < cfg.alphaDecay) break;
            std::optional<NodeIndex> next;
            if (step % 2 == 1) {
                next = cfg.vanilla ? walkToItemUniform(snap, lastUser, rng) : walkToItem(snap, lastUser, rng);
                if (next) item = *next;
            } else {
                next = cfg.vanilla ? walkToUserUniform(snap, item, rng) : walkToUser(snap, item, lastUser, rng);
                if (next) lastUser = *next;
            }
            if (!next) break;
            walk.push_back(*next);
        }
        walks.add(walk);
    }
    return walks;
}

} // namespace w3r

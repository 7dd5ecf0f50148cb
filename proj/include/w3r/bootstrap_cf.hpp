#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "w3r/snapshot.hpp"
#include "w3r/trust_network.hpp"

namespace w3r {

struct CfConfig {
    double mixWeight = 0.5; //!< tau_sim: sim = Nsim * tau + (1 - tau) * Dsim
    std::size_t topM = 5;

    void validate() const {
        if (!(mixWeight >= 0.0 && mixWeight <= 1.0)) throw std::invalid_argument("mix weight must lie in [0,1]");
        if (topM == 0) throw std::invalid_argument("topM must be positive");
    }
};

//! Ratings R(a,i) = Af(a,i) with per-user means over each user's rated items.
class RatingView {
public:
    explicit RatingView(const GraphSnapshot& snap) : snap_(&snap), avg_(snap.userCount(), 0.0) {
        for (NodeIndex u = 0; u < snap.userCount(); ++u) {
            auto items = snap.itemsOf(u);
            if (items.empty()) continue;
            double sum = 0.0;
            for (const auto& l : items) sum += l.weight;
            avg_[u] = sum / static_cast<double>(items.size());
        }
    }

    const GraphSnapshot& snapshot() const { return *snap_; }
    std::span<const WeightedLink> ratings(NodeIndex u) const { return snap_->itemsOf(u); }
    double average(NodeIndex u) const { return avg_[u]; }
    double centered(NodeIndex u, double rating) const { return rating - avg_[u]; }

    //! Calls fn(item, R(a,i), R(b,i)) for every commonly rated item, in item order.
    template <typename Fn>
    void forEachCommon(NodeIndex a, NodeIndex b, Fn fn) const {
        auto ra = ratings(a);
        auto rb = ratings(b);
        std::size_t x = 0, y = 0;
        while (x < ra.size() && y < rb.size()) {
            if (ra[x].target < rb[y].target) {
                ++x;
            } else if (rb[y].target < ra[x].target) {
                ++y;
            } else {
                fn(ra[x].target, ra[x].weight, rb[y].weight);
                ++x;
                ++y;
            }
        }
    }

    std::size_t commonCount(NodeIndex a, NodeIndex b) const {
        std::size_t n = 0;
        forEachCommon(a, b, [&](NodeIndex, double, double) { ++n; });
        return n;
    }

    //! |I_a ∩ I_x| for every user x != a sharing at least one item, by user index.
    std::vector<std::pair<NodeIndex, std::size_t>> overlaps(NodeIndex a) const {
        std::vector<std::size_t> counts(snap_->userCount(), 0);
        for (const auto& l : ratings(a)) {
            for (const auto& holder : snap_->usersOf(l.target)) ++counts[holder.target];
        }
        std::vector<std::pair<NodeIndex, std::size_t>> out;
        for (NodeIndex x = 0; x < counts.size(); ++x) {
            if (x != a && counts[x] > 0) out.emplace_back(x, counts[x]);
        }
        return out;
    }

private:
    const GraphSnapshot* snap_;
    std::vector<double> avg_;
};

struct PearsonResult {
    double value = 0.0;
    bool hasOverlap = false;
};

//! Pearson correlation of mean-centered ratings over the common items.
inline PearsonResult pearsonSim(NodeIndex a, NodeIndex b, const RatingView& view) {
    double num = 0.0, sa = 0.0, sb = 0.0;
    bool any = false;
    view.forEachCommon(a, b, [&](NodeIndex, double ra, double rb) {
        const double ca = view.centered(a, ra);
        const double cb = view.centered(b, rb);
        num += ca * cb;
        sa += ca * ca;
        sb += cb * cb;
        any = true;
    });
    if (!any) return {0.0, false};
    if (sa == 0.0 || sb == 0.0) return {0.0, true};
    return {std::clamp(num / (std::sqrt(sa) * std::sqrt(sb)), -1.0, 1.0), true};
}

//! cf(a,b) = |I_a ∩ I_b| / max_{x != a} |I_a ∩ I_x|.
inline double commonPreference(NodeIndex a, NodeIndex b, const RatingView& view) {
    std::size_t best = 0;
    for (const auto& [x, n] : view.overlaps(a)) best = std::max(best, n);
    if (best == 0) return 0.0;
    return static_cast<double>(view.commonCount(a, b)) / static_cast<double>(best);
}

//! Rating-difference similarity on common items: 1 minus the mean absolute
//! rating difference normalized by the rating spread seen on the overlap.
inline double dsim(NodeIndex a, NodeIndex b, const RatingView& view) {
    double diff = 0.0, lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    view.forEachCommon(a, b, [&](NodeIndex, double ra, double rb) {
        diff += std::abs(ra - rb);
        if (n == 0) {
            lo = std::min(ra, rb);
            hi = std::max(ra, rb);
        } else {
            lo = std::min({lo, ra, rb});
            hi = std::max({hi, ra, rb});
        }
        ++n;
    });
    if (n == 0) return 0.0;
    const double range = std::max(hi - lo, 1e-9);
    return std::clamp(1.0 - diff / static_cast<double>(n) / range, 0.0, 1.0);
}

namespace detail {

inline double mixSimilarity(double cf, double pearson, double d, double tau) {
    const double nsim = cf * pearson;
    return nsim * tau + (1.0 - tau) * d;
}

} // namespace detail

inline double similarity(NodeIndex a, NodeIndex b, const CfConfig& cfg, const RatingView& view) {
    cfg.validate();
    if (view.commonCount(a, b) == 0) return 0.0;
    return detail::mixSimilarity(commonPreference(a, b, view), pearsonSim(a, b, view).value, dsim(a, b, view),
                                 cfg.mixWeight);
}

struct SimilarUser {
    NodeIndex user;
    double similarity;
};

//! Similarity of `a` to every user sharing an item with it (optionally
//! restricted to `candidates`), most similar first, ties by user id.
inline std::vector<SimilarUser> similarityRow(NodeIndex a, const CfConfig& cfg, const RatingView& view,
                                              const std::set<std::string>* candidates = nullptr) {
    cfg.validate();
    const auto overlaps = view.overlaps(a);
    std::size_t best = 0;
    for (const auto& [x, n] : overlaps) best = std::max(best, n);
    std::vector<SimilarUser> row;
    for (const auto& [x, n] : overlaps) {
        if (candidates && !candidates->count(view.snapshot().userId(x))) continue;
        const double cf = static_cast<double>(n) / static_cast<double>(best);
        row.push_back({x, detail::mixSimilarity(cf, pearsonSim(a, x, view).value, dsim(a, x, view), cfg.mixWeight)});
    }
    std::sort(row.begin(), row.end(), [](const SimilarUser& l, const SimilarUser& r) {
        if (l.similarity != r.similarity) return l.similarity > r.similarity;
        return l.user < r.user;
    });
    return row;
}

//! `a,b,similarity` rows for the given users.
inline std::string similarityCsv(const std::vector<NodeIndex>& users, const CfConfig& cfg, const RatingView& view) {
    std::string out = "userA,userB,similarity\n";
    char buf[64];
    for (NodeIndex a : users) {
        for (const auto& s : similarityRow(a, cfg, view)) {
            auto res = std::to_chars(buf, buf + sizeof(buf), s.similarity);
            out += view.snapshot().userId(a) + ',' + view.snapshot().userId(s.user) + ',' + std::string(buf, res.ptr) + '\n';
        }
    }
    return out;
}

class ColdUserError : public std::runtime_error {
public:
    explicit ColdUserError(const std::string& user)
        : std::runtime_error("user '" + user + "' has no affinity edges; seed it with divisive items first") {}
};

namespace detail {

inline std::size_t installTrust(TrustNetwork& net, const GraphSnapshot& snap, NodeIndex a,
                                const std::vector<SimilarUser>& row, std::size_t topM, Timestamp ts) {
    std::size_t installed = 0;
    for (const auto& s : row) {
        if (installed == topM) break;
        if (!(s.similarity > 0.0)) break;
        net.setTrust(NodeId::user(snap.userId(a)), NodeId::user(snap.userId(s.user)), std::max(0.0, s.similarity), ts);
        ++installed;
    }
    return installed;
}

} // namespace detail

//! Installs trust edges from `newUser` to its topM most similar users
//! (positive similarity only). Returns the number of edges installed.
inline std::size_t bootstrapTrust(TrustNetwork& net, const std::string& newUser, const CfConfig& cfg, Timestamp ts,
                                  const std::set<std::string>* candidates = nullptr) {
    cfg.validate();
    const GraphSnapshot snap(net);
    auto a = snap.userIndex(newUser);
    if (!a) throw std::invalid_argument("unknown user '" + newUser + "'");
    if (snap.itemsOf(*a).empty()) throw ColdUserError(newUser);
    const RatingView view(snap);
    return detail::installTrust(net, snap, *a, similarityRow(*a, cfg, view, candidates), cfg.topM, ts);
}

//! The `count` items whose ratings vary most across users, ties by item id.
inline std::vector<std::string> divisiveItems(const GraphSnapshot& snap, std::size_t count) {
    std::vector<std::pair<double, NodeIndex>> scored;
    for (NodeIndex i = 0; i < snap.itemCount(); ++i) {
        auto holders = snap.usersOf(i);
        double mean = 0.0;
        for (const auto& h : holders) mean += h.weight;
        mean /= static_cast<double>(holders.size());
        double var = 0.0;
        for (const auto& h : holders) var += (h.weight - mean) * (h.weight - mean);
        scored.emplace_back(var / static_cast<double>(holders.size()), i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) {
        if (l.first != r.first) return l.first > r.first;
        return l.second < r.second;
    });
    std::vector<std::string> out;
    for (std::size_t k = 0; k < std::min(count, scored.size()); ++k) out.push_back(snap.itemId(scored[k].second));
    return out;
}

//! Builds the trust side of a test network: every user gets trust edges to
//! its most similar users. Similarities depend only on the affinity side,
//! so the result does not depend on user order.
inline TrustNetwork genTestNetwork(TrustNetwork net, const CfConfig& cfg, Timestamp ts) {
    cfg.validate();
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    for (NodeIndex a = 0; a < snap.userCount(); ++a) {
        if (snap.itemsOf(a).empty()) continue;
        detail::installTrust(net, snap, a, similarityRow(a, cfg, view), std::min(cfg.topM, net.limits().trustFanout), ts);
    }
    return net;
}

} // namespace w3r

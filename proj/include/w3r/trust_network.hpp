#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "w3r/types.hpp"

namespace w3r {

struct NetworkLimits {
    std::size_t windowCapacity = 100000; //!< n: max user-item edges retained
    std::size_t trustFanout = 5;         //!< K: max trust out-edges per user

    bool operator==(const NetworkLimits&) const = default;
};

struct TrustLink {
    double weight = 0.0;
    Timestamp timestamp = 0;

    bool operator==(const TrustLink&) const = default;
};

struct AffinityLink {
    double weight = 0.0;
    Timestamp timestamp = 0;
    //! Local play count PC(u,i). Zero for edges learned from gossip or a file;
    //! those keep the weight their origin replica computed.
    std::int64_t playCount = 0;
};

struct UserRecord {
    std::map<std::string, TrustLink, std::less<>> trust;
    std::map<std::string, AffinityLink, std::less<>> affinity;
};

namespace detail {
struct NetworkBuilder;
}

//! The dual graph: directed weighted user->user trust edges plus the
//! undirected weighted bipartite user-item affinity graph, all timestamped.
//!
//! Single writer; readers that need a stable view for a whole query should
//! take a GraphSnapshot.
class TrustNetwork {
public:
    using UserMap = std::map<std::string, UserRecord, std::less<>>;
    using ItemMap = std::map<std::string, std::set<std::string, std::less<>>, std::less<>>;

    explicit TrustNetwork(NetworkLimits limits = {}) : limits_(limits) {
        if (limits_.windowCapacity == 0 || limits_.trustFanout == 0) {
            throw std::invalid_argument("window capacity and trust fanout must be positive");
        }
    }

    const NetworkLimits& limits() const { return limits_; }

    void addUser(std::string_view id) {
        requireValidId(id);
        userRecord(id);
    }

    bool hasUser(std::string_view id) const { return users_.find(id) != users_.end(); }
    bool hasItem(std::string_view id) const { return items_.find(id) != items_.end(); }

    //! Adds `playCountDelta` to PC(user, item), recomputes the user's
    //! affinities Af(u,i) = PC(u,i) / sum_x PC(u,x) and prunes the window.
    void recordInteraction(const NodeId& user, const NodeId& item, std::int64_t playCountDelta,
                           Timestamp timestamp) {
        if (!user.isUser() || !item.isItem()) {
            throw std::invalid_argument("recordInteraction needs a user and an item");
        }
        if (playCountDelta <= 0) {
            throw std::invalid_argument("play count delta must be positive");
        }
        requireTimestamp(timestamp);
        requireValidId(user.id);
        requireValidId(item.id);

        UserRecord& rec = userRecord(user.id);
        auto it = rec.affinity.find(item.id);
        if (it == rec.affinity.end()) {
            it = rec.affinity.emplace(item.id, AffinityLink{0.0, timestamp, 0}).first;
            items_[item.id].insert(user.id);
            window_.insert(WindowKey{timestamp, user.id, item.id});
        } else if (timestamp > it->second.timestamp) {
            window_.erase(WindowKey{it->second.timestamp, user.id, item.id});
            it->second.timestamp = timestamp;
            window_.insert(WindowKey{timestamp, user.id, item.id});
        }
        it->second.playCount += playCountDelta;
        renormalize(rec);
        enforceWindow();
    }

    //! Upserts a trust edge. An existing edge is only replaced by a strictly
    //! newer version. Returns true if the network changed.
    bool setTrust(const NodeId& from, const NodeId& to, double weight, Timestamp timestamp) {
        if (!from.isUser() || !to.isUser()) {
            throw std::invalid_argument("trust edges connect two users");
        }
        return upsertTrust(from.id, to.id, weight, timestamp);
    }

    //! Last-writer-wins merge of a single edge version (trust or affinity).
    //! Fanout and window rules run after insertion. Returns true if the
    //! network changed.
    bool merge(const TimedEdge& edge) {
        if (edge.isTrust()) {
            return upsertTrust(edge.src.id, edge.dst.id, edge.weight, edge.timestamp);
        }
        NodeId user = edge.src;
        NodeId item = edge.dst;
        if (user.isItem() && item.isUser()) std::swap(user, item);
        if (!user.isUser() || !item.isItem()) {
            throw std::invalid_argument("edge must be user->user or user-item");
        }
        requireWeight(edge.weight);
        requireTimestamp(edge.timestamp);
        requireValidId(user.id);
        requireValidId(item.id);

        UserRecord& rec = userRecord(user.id);
        const double weight = canonicalWeight(edge.weight);
        auto it = rec.affinity.find(item.id);
        if (it == rec.affinity.end()) {
            rec.affinity.emplace(item.id, AffinityLink{weight, edge.timestamp, 0});
            items_[item.id].insert(user.id);
            window_.insert(WindowKey{edge.timestamp, user.id, item.id});
            enforceWindow();
            return affinity(user.id, item.id) != nullptr;
        }
        if (edge.timestamp <= it->second.timestamp) return false;
        window_.erase(WindowKey{it->second.timestamp, user.id, item.id});
        // The winning version's weight is authoritative; local counts no longer describe it.
        it->second = AffinityLink{weight, edge.timestamp, 0};
        window_.insert(WindowKey{edge.timestamp, user.id, item.id});
        return true;
    }

    //! Drops an affinity edge and renormalizes the user's remaining affinities.
    bool removeAffinity(std::string_view user, std::string_view item) {
        auto uit = users_.find(user);
        if (uit == users_.end()) return false;
        auto ait = uit->second.affinity.find(item);
        if (ait == uit->second.affinity.end()) return false;
        window_.erase(WindowKey{ait->second.timestamp, uit->first, ait->first});
        dropItemUser(ait->first, uit->first);
        uit->second.affinity.erase(ait);
        renormalize(uit->second, true);
        return true;
    }

    bool removeTrust(std::string_view from, std::string_view to) {
        auto uit = users_.find(from);
        if (uit == users_.end()) return false;
        auto tit = uit->second.trust.find(to);
        if (tit == uit->second.trust.end()) return false;
        uit->second.trust.erase(tit);
        --trustEdges_;
        return true;
    }

    const UserMap& users() const { return users_; }
    const ItemMap& items() const { return items_; }

    std::size_t userCount() const { return users_.size(); }
    std::size_t itemCount() const { return items_.size(); }
    std::size_t trustEdgeCount() const { return trustEdges_; }
    std::size_t affinityEdgeCount() const { return window_.size(); }

    const TrustLink* trust(std::string_view from, std::string_view to) const {
        auto uit = users_.find(from);
        if (uit == users_.end()) return nullptr;
        auto tit = uit->second.trust.find(to);
        return tit == uit->second.trust.end() ? nullptr : &tit->second;
    }

    const AffinityLink* affinity(std::string_view user, std::string_view item) const {
        auto uit = users_.find(user);
        if (uit == users_.end()) return nullptr;
        auto ait = uit->second.affinity.find(item);
        return ait == uit->second.affinity.end() ? nullptr : &ait->second;
    }

    //! All edges: trust edges by (src, dst), then affinity edges by (user, item).
    std::vector<TimedEdge> edges() const {
        std::vector<TimedEdge> out;
        out.reserve(trustEdges_ + window_.size());
        for (const auto& [uid, rec] : users_) {
            for (const auto& [dst, link] : rec.trust) {
                out.push_back({NodeId::user(uid), NodeId::user(dst), link.weight, link.timestamp});
            }
        }
        for (const auto& [uid, rec] : users_) {
            for (const auto& [iid, link] : rec.affinity) {
                out.push_back({NodeId::user(uid), NodeId::item(iid), link.weight, link.timestamp});
            }
        }
        return out;
    }

    Timestamp maxTimestamp() const {
        Timestamp t = window_.empty() ? 0 : window_.rbegin()->timestamp;
        for (const auto& [uid, rec] : users_) {
            for (const auto& [dst, link] : rec.trust) t = std::max(t, link.timestamp);
        }
        return t;
    }

    //! Structural equality: same limits, users, edges, weights and
    //! timestamps. Local play-count bookkeeping is not compared.
    friend bool operator==(const TrustNetwork& a, const TrustNetwork& b) {
        if (!(a.limits_ == b.limits_) || a.users_.size() != b.users_.size() ||
            a.trustEdges_ != b.trustEdges_ || a.window_.size() != b.window_.size()) {
            return false;
        }
        for (auto ia = a.users_.begin(), ib = b.users_.begin(); ia != a.users_.end(); ++ia, ++ib) {
            if (ia->first != ib->first || ia->second.trust != ib->second.trust) return false;
            const auto& fa = ia->second.affinity;
            const auto& fb = ib->second.affinity;
            if (fa.size() != fb.size()) return false;
            for (auto ea = fa.begin(), eb = fb.begin(); ea != fa.end(); ++ea, ++eb) {
                if (ea->first != eb->first || ea->second.weight != eb->second.weight ||
                    ea->second.timestamp != eb->second.timestamp) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    friend struct detail::NetworkBuilder;

    struct WindowKey {
        Timestamp timestamp;
        std::string user;
        std::string item;

        auto operator<=>(const WindowKey&) const = default;
    };

    static void requireTimestamp(Timestamp t) {
        if (t <= 0) throw std::invalid_argument("timestamps must be positive");
    }

    static void requireWeight(double w) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("edge weights must be finite and non-negative");
        }
    }

    UserRecord& userRecord(std::string_view id) {
        auto it = users_.find(id);
        if (it == users_.end()) it = users_.emplace(std::string(id), UserRecord{}).first;
        return it->second;
    }

    bool upsertTrust(std::string_view from, std::string_view to, double weight, Timestamp timestamp) {
        requireValidId(from);
        requireValidId(to);
        if (from == to) throw std::invalid_argument("self-trust is not allowed");
        requireWeight(weight);
        requireTimestamp(timestamp);

        userRecord(to);
        UserRecord& rec = userRecord(from);
        const double w = canonicalWeight(weight);
        auto it = rec.trust.find(to);
        if (it != rec.trust.end()) {
            if (timestamp <= it->second.timestamp) return false;
            it->second = TrustLink{w, timestamp};
            return true;
        }
        rec.trust.emplace(std::string(to), TrustLink{w, timestamp});
        ++trustEdges_;
        enforceFanout(rec);
        return rec.trust.find(to) != rec.trust.end();
    }

    //! Keeps the K heaviest out-edges; evicts by (weight, timestamp, dst) ascending.
    void enforceFanout(UserRecord& rec) {
        while (rec.trust.size() > limits_.trustFanout) {
            auto victim = rec.trust.begin();
            for (auto it = std::next(rec.trust.begin()); it != rec.trust.end(); ++it) {
                if (std::tie(it->second.weight, it->second.timestamp, it->first) <
                    std::tie(victim->second.weight, victim->second.timestamp, victim->first)) {
                    victim = it;
                }
            }
            rec.trust.erase(victim);
            --trustEdges_;
        }
    }

    //! Evicts the oldest affinity edges, ties by (userId, itemId), until at most n remain.
    void enforceWindow() {
        while (window_.size() > limits_.windowCapacity) {
            const WindowKey oldest = *window_.begin();
            window_.erase(window_.begin());
            auto uit = users_.find(oldest.user);
            uit->second.affinity.erase(oldest.item);
            dropItemUser(oldest.item, oldest.user);
            renormalize(uit->second);
        }
    }

    void dropItemUser(std::string_view item, std::string_view user) {
        auto it = items_.find(item);
        if (it == items_.end()) return;
        it->second.erase(std::string(user));
        if (it->second.empty()) items_.erase(it);
    }

    //! Af(u,i) = PC(u,i) / sum_x PC(u,x) over the locally counted edges.
    //! Uncounted edges keep their weight, except that a user with no counted
    //! edges at all is rescaled proportionally when `rescaleUncounted` is set.
    static void renormalize(UserRecord& rec, bool rescaleUncounted = false) {
        std::int64_t total = 0;
        double uncounted = 0.0;
        for (const auto& [iid, link] : rec.affinity) {
            total += link.playCount;
            if (link.playCount == 0) uncounted += link.weight;
        }
        if (total == 0) {
            if (!rescaleUncounted || !(uncounted > 0.0)) return;
            for (auto& [iid, link] : rec.affinity) link.weight = canonicalWeight(link.weight / uncounted);
            return;
        }
        for (auto& [iid, link] : rec.affinity) {
            if (link.playCount > 0) {
                link.weight = canonicalWeight(static_cast<double>(link.playCount) / static_cast<double>(total));
            }
        }
    }

    NetworkLimits limits_;
    UserMap users_;
    ItemMap items_;
    std::set<WindowKey> window_;
    std::size_t trustEdges_ = 0;
};

namespace detail {

//! Unchecked construction used by the deserializer after it has validated
//! the input itself.
struct NetworkBuilder {
    static void addTrust(TrustNetwork& net, const std::string& from, const std::string& to,
                         double weight, Timestamp ts) {
        net.userRecord(from).trust.emplace(to, TrustLink{canonicalWeight(weight), ts});
        ++net.trustEdges_;
    }
    static void addAffinity(TrustNetwork& net, const std::string& user, const std::string& item,
                            double weight, Timestamp ts) {
        net.userRecord(user).affinity.emplace(item, AffinityLink{canonicalWeight(weight), ts, 0});
        net.items_[item].insert(user);
        net.window_.insert(TrustNetwork::WindowKey{ts, user, item});
    }
};

} // namespace detail

} // namespace w3r

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "w3r/trust_network.hpp"

namespace w3r {

using NodeIndex = std::uint32_t;

struct WeightedLink {
    NodeIndex target;
    double weight;
};

//! Immutable, integer-indexed copy of a TrustNetwork's adjacency. Users and
//! items are numbered in id order; every adjacency list is sorted by target.
class GraphSnapshot {
public:
    explicit GraphSnapshot(const TrustNetwork& net) {
        auto users = std::make_shared<std::vector<std::string>>();
        auto items = std::make_shared<std::vector<std::string>>();
        users->reserve(net.userCount());
        items->reserve(net.itemCount());
        for (const auto& [uid, rec] : net.users()) users->push_back(uid);
        for (const auto& [iid, holders] : net.items()) items->push_back(iid);
        userIds_ = std::move(users);
        itemIds_ = std::move(items);

        userItems_.resize(userIds_->size());
        itemUsers_.resize(itemIds_->size());
        trustOut_.resize(userIds_->size());
        NodeIndex u = 0;
        for (const auto& [uid, rec] : net.users()) {
            auto& items = userItems_[u];
            items.reserve(rec.affinity.size());
            for (const auto& [iid, link] : rec.affinity) {
                const NodeIndex i = *itemIndex(iid);
                items.push_back({i, link.weight});
                itemUsers_[i].push_back({u, link.weight});
            }
            auto& trust = trustOut_[u];
            trust.reserve(rec.trust.size());
            for (const auto& [dst, link] : rec.trust) trust.push_back({*userIndex(dst), link.weight});
            ++u;
        }
    }

    std::size_t userCount() const { return userIds_->size(); }
    std::size_t itemCount() const { return itemIds_->size(); }

    const std::string& userId(NodeIndex u) const { return (*userIds_)[u]; }
    const std::string& itemId(NodeIndex i) const { return (*itemIds_)[i]; }
    const std::shared_ptr<const std::vector<std::string>>& userIds() const { return userIds_; }
    const std::shared_ptr<const std::vector<std::string>>& itemIds() const { return itemIds_; }

    std::optional<NodeIndex> userIndex(std::string_view id) const { return find(*userIds_, id); }
    std::optional<NodeIndex> itemIndex(std::string_view id) const { return find(*itemIds_, id); }

    std::span<const WeightedLink> itemsOf(NodeIndex user) const { return userItems_[user]; }
    std::span<const WeightedLink> usersOf(NodeIndex item) const { return itemUsers_[item]; }
    std::span<const WeightedLink> trustOf(NodeIndex user) const { return trustOut_[user]; }

    //! Af(user, item), or nullopt when there is no affinity edge.
    std::optional<double> affinity(NodeIndex user, NodeIndex item) const {
        return lookup(userItems_[user], item);
    }

    std::optional<double> trust(NodeIndex from, NodeIndex to) const { return lookup(trustOut_[from], to); }

private:
    static std::optional<NodeIndex> find(const std::vector<std::string>& ids, std::string_view id) {
        auto it = std::lower_bound(ids.begin(), ids.end(), id, [](const std::string& a, std::string_view b) { return a < b; });
        if (it == ids.end() || *it != id) return std::nullopt;
        return static_cast<NodeIndex>(it - ids.begin());
    }

    static std::optional<double> lookup(const std::vector<WeightedLink>& links, NodeIndex target) {
        auto it = std::lower_bound(links.begin(), links.end(), target,
                                   [](const WeightedLink& l, NodeIndex t) { return l.target < t; });
        if (it == links.end() || it->target != target) return std::nullopt;
        return it->weight;
    }

    std::shared_ptr<const std::vector<std::string>> userIds_;
    std::shared_ptr<const std::vector<std::string>> itemIds_;
    std::vector<std::vector<WeightedLink>> userItems_;
    std::vector<std::vector<WeightedLink>> itemUsers_;
    std::vector<std::vector<WeightedLink>> trustOut_;
};

} // namespace w3r

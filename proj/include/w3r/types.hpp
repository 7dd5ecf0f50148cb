#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace w3r {

using Timestamp = std::int64_t;

enum class NodeKind : std::uint8_t { User, Item };

inline std::string_view toString(NodeKind kind) {
    return kind == NodeKind::User ? "user" : "item";
}

//! A user or item identifier. User and item ids live in disjoint namespaces:
//! NodeId::user("a") and NodeId::item("a") are different nodes.
struct NodeId {
    NodeKind kind = NodeKind::User;
    std::string id;

    static NodeId user(std::string id) { return {NodeKind::User, std::move(id)}; }
    static NodeId item(std::string id) { return {NodeKind::Item, std::move(id)}; }

    bool isUser() const { return kind == NodeKind::User; }
    bool isItem() const { return kind == NodeKind::Item; }

    auto operator<=>(const NodeId&) const = default;
    bool operator==(const NodeId&) const = default;
};

//! Unit of storage, gossip and merge. Trust edges are user->user; affinity
//! edges hold the user in `src` and the item in `dst`.
struct TimedEdge {
    NodeId src;
    NodeId dst;
    double weight = 0.0;
    Timestamp timestamp = 0;

    bool isTrust() const { return src.isUser() && dst.isUser(); }
    bool isAffinity() const { return src.isUser() && dst.isItem(); }

    bool operator==(const TimedEdge&) const = default;
};

//! Ids are written verbatim into the text serialization, so they must be
//! non-empty and free of whitespace.
inline bool isValidId(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return false;
    }
    return true;
}

inline void requireValidId(std::string_view id) {
    if (!isValidId(id)) {
        throw std::invalid_argument("invalid node id '" + std::string(id) + "'");
    }
}

//! Weights are stored rounded to 12 significant digits, the precision of the
//! canonical text format, so that a serialized network reloads bit-exact.
inline double canonicalWeight(double w) {
    if (w == 0.0 || !std::isfinite(w)) return w == 0.0 ? 0.0 : w;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), w, std::chars_format::general, 12);
    double out = 0.0;
    std::from_chars(buf, res.ptr, out);
    return out;
}

//! Shortest representation that round-trips the (already canonical) weight.
inline std::string formatWeight(double w) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), canonicalWeight(w));
    return std::string(buf, res.ptr);
}

} // namespace w3r

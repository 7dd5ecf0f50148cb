#pragma once

// Canonical text format (LF line endings):
//
//   W3R 1
//   <numUsers> <numItems> <numTrustEdges> <numAffinityEdges> <n> <K>
//   U <index> <userId>                      sorted by userId
//   I <index> <itemId>                      sorted by itemId
//   T <srcIdx> <dstIdx> <weight> <timestamp>    sorted by (srcIdx, dstIdx)
//   A <userIdx> <itemIdx> <weight> <timestamp>  sorted by (userIdx, itemIdx)
//
// Weights use the shortest representation of the 12-significant-digit value.

#include <charconv>
#include <cmath>
#include <tuple>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "w3r/trust_network.hpp"

namespace w3r {

enum class ParseErrorKind {
    BadMagic,
    MalformedHeader,
    HeaderMismatch, //!< record counts disagree with the header (e.g. truncation)
    MalformedRecord,
    DanglingIndex,
    InvariantViolation,
};

inline std::string_view toString(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::BadMagic: return "bad magic";
    case ParseErrorKind::MalformedHeader: return "malformed header";
    case ParseErrorKind::HeaderMismatch: return "header mismatch";
    case ParseErrorKind::MalformedRecord: return "malformed record";
    case ParseErrorKind::DanglingIndex: return "dangling node index";
    case ParseErrorKind::InvariantViolation: return "invariant violation";
    }
    return "unknown";
}

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + std::string(toString(kind)) + ": " + what),
          kind_(kind), line_(line) {}

    ParseErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }

private:
    ParseErrorKind kind_;
    std::size_t line_;
};

inline std::string serialize(const TrustNetwork& net) {
    std::map<std::string_view, std::size_t> userIndex;
    std::map<std::string_view, std::size_t> itemIndex;
    for (const auto& [uid, rec] : net.users()) userIndex.emplace(uid, userIndex.size());
    for (const auto& [iid, users] : net.items()) itemIndex.emplace(iid, itemIndex.size());

    std::string out;
    out += "W3R 1\n";
    out += std::to_string(net.userCount()) + ' ' + std::to_string(net.itemCount()) + ' ' +
           std::to_string(net.trustEdgeCount()) + ' ' + std::to_string(net.affinityEdgeCount()) + ' ' +
           std::to_string(net.limits().windowCapacity) + ' ' + std::to_string(net.limits().trustFanout) + '\n';
    for (const auto& [uid, idx] : userIndex) {
        out += "U " + std::to_string(idx) + ' ' + std::string(uid) + '\n';
    }
    for (const auto& [iid, idx] : itemIndex) {
        out += "I " + std::to_string(idx) + ' ' + std::string(iid) + '\n';
    }
    // std::map iteration order over ids equals index order, so the nested
    // loops already emit (srcIdx, dstIdx) order.
    for (const auto& [uid, rec] : net.users()) {
        const std::string src = std::to_string(userIndex.at(uid));
        for (const auto& [dst, link] : rec.trust) {
            out += "T " + src + ' ' + std::to_string(userIndex.at(dst)) + ' ' + formatWeight(link.weight) + ' ' +
                   std::to_string(link.timestamp) + '\n';
        }
    }
    for (const auto& [uid, rec] : net.users()) {
        const std::string src = std::to_string(userIndex.at(uid));
        for (const auto& [iid, link] : rec.affinity) {
            out += "A " + src + ' ' + std::to_string(itemIndex.at(iid)) + ' ' + formatWeight(link.weight) + ' ' +
                   std::to_string(link.timestamp) + '\n';
        }
    }
    return out;
}

namespace detail {

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    //! Next line without its LF; false at end of input.
    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) end = text_.size();
        line = text_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++lineNo_;
        return true;
    }

    std::size_t lineNo() const { return lineNo_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t lineNo_ = 0;
};

inline std::vector<std::string_view> splitFields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        auto end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        fields.push_back(line.substr(pos, end - pos));
        pos = end + 1;
    }
    return fields;
}

template <typename T>
bool parseNumber(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

} // namespace detail

inline TrustNetwork deserialize(std::string_view text) {
    detail::LineReader reader(text);
    std::string_view line;

    if (!reader.next(line) || line != "W3R 1") {
        throw ParseError(ParseErrorKind::BadMagic, 1, "expected 'W3R 1'");
    }
    if (!reader.next(line)) {
        throw ParseError(ParseErrorKind::MalformedHeader, 2, "missing count header");
    }
    const auto header = detail::splitFields(line);
    std::size_t counts[6] = {};
    if (header.size() != 6) {
        throw ParseError(ParseErrorKind::MalformedHeader, 2, "expected six counts");
    }
    for (std::size_t k = 0; k < 6; ++k) {
        if (!detail::parseNumber(header[k], counts[k])) {
            throw ParseError(ParseErrorKind::MalformedHeader, 2, "non-numeric count '" + std::string(header[k]) + "'");
        }
    }
    const auto [numUsers, numItems, numTrust, numAffinity, window, fanout] =
        std::tuple{counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]};
    if (window == 0 || fanout == 0) {
        throw ParseError(ParseErrorKind::MalformedHeader, 2, "n and K must be positive");
    }
    if (numAffinity > window) {
        throw ParseError(ParseErrorKind::InvariantViolation, 2, "more affinity edges than window capacity");
    }

    TrustNetwork net(NetworkLimits{window, fanout});

    auto nextRecord = [&](char tag) {
        if (!reader.next(line)) {
            throw ParseError(ParseErrorKind::HeaderMismatch, reader.lineNo() + 1,
                             std::string("input ended before expected '") + tag + "' record");
        }
        auto fields = detail::splitFields(line);
        if (fields.empty() || fields[0].size() != 1 || fields[0][0] != tag) {
            throw ParseError(ParseErrorKind::HeaderMismatch, reader.lineNo(),
                             std::string("expected '") + tag + "' record");
        }
        return fields;
    };

    auto readNodes = [&](char tag, std::size_t count, std::vector<std::string>& ids) {
        ids.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            auto f = nextRecord(tag);
            std::size_t idx = 0;
            if (f.size() != 3 || !detail::parseNumber(f[1], idx)) {
                throw ParseError(ParseErrorKind::MalformedRecord, reader.lineNo(), "expected '<tag> <index> <id>'");
            }
            if (idx != k) {
                throw ParseError(ParseErrorKind::MalformedRecord, reader.lineNo(),
                                 "index " + std::to_string(idx) + " out of sequence");
            }
            if (!isValidId(f[2])) {
                throw ParseError(ParseErrorKind::MalformedRecord, reader.lineNo(), "invalid id");
            }
            if (!ids.empty() && !(ids.back() < f[2])) {
                throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(), "ids not strictly sorted");
            }
            ids.emplace_back(f[2]);
        }
    };

    std::vector<std::string> userIds, itemIds;
    readNodes('U', numUsers, userIds);
    readNodes('I', numItems, itemIds);
    for (const auto& uid : userIds) net.addUser(uid);

    struct EdgeFields {
        std::size_t a, b;
        double weight;
        Timestamp ts;
    };
    auto readEdge = [&](char tag, std::size_t aLimit, std::size_t bLimit) {
        auto f = nextRecord(tag);
        EdgeFields e{};
        if (f.size() != 5 || !detail::parseNumber(f[1], e.a) || !detail::parseNumber(f[2], e.b) ||
            !detail::parseNumber(f[3], e.weight) || !detail::parseNumber(f[4], e.ts)) {
            throw ParseError(ParseErrorKind::MalformedRecord, reader.lineNo(),
                             std::string("expected '") + tag + " <idx> <idx> <weight> <timestamp>'");
        }
        if (e.a >= aLimit || e.b >= bLimit) {
            throw ParseError(ParseErrorKind::DanglingIndex, reader.lineNo(), "node index out of range");
        }
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(), "negative weight");
        }
        if (e.ts <= 0) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(), "non-positive timestamp");
        }
        return e;
    };

    std::vector<std::size_t> outDegree(numUsers, 0);
    std::pair<std::size_t, std::size_t> last{0, 0};
    for (std::size_t k = 0; k < numTrust; ++k) {
        auto e = readEdge('T', numUsers, numUsers);
        if (e.a == e.b) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(), "self-trust edge");
        }
        if (k > 0 && !(last < std::pair{e.a, e.b})) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(),
                             "trust edges not strictly sorted (duplicate edge?)");
        }
        last = {e.a, e.b};
        if (++outDegree[e.a] > fanout) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(),
                             "user '" + userIds[e.a] + "' exceeds trust fanout K=" + std::to_string(fanout));
        }
        detail::NetworkBuilder::addTrust(net, userIds[e.a], userIds[e.b], e.weight, e.ts);
    }

    std::vector<bool> itemSeen(numItems, false);
    for (std::size_t k = 0; k < numAffinity; ++k) {
        auto e = readEdge('A', numUsers, numItems);
        if (k > 0 && !(last < std::pair{e.a, e.b})) {
            throw ParseError(ParseErrorKind::InvariantViolation, reader.lineNo(),
                             "affinity edges not strictly sorted (duplicate edge?)");
        }
        last = {e.a, e.b};
        itemSeen[e.b] = true;
        detail::NetworkBuilder::addAffinity(net, userIds[e.a], itemIds[e.b], e.weight, e.ts);
    }

    while (reader.next(line)) {
        if (!line.empty()) {
            throw ParseError(ParseErrorKind::HeaderMismatch, reader.lineNo(), "more records than the header declares");
        }
    }
    for (std::size_t k = 0; k < numItems; ++k) {
        if (!itemSeen[k]) {
            throw ParseError(ParseErrorKind::InvariantViolation, 3 + numUsers + k,
                             "item '" + itemIds[k] + "' has no affinity edges");
        }
    }
    return net;
}

} // namespace w3r

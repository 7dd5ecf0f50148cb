#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "w3r/rng.hpp"
#include "w3r/trust_network.hpp"

namespace w3r {

struct Triplet {
    std::string user;
    std::string item;
    std::int64_t playCount = 0;

    bool operator==(const Triplet&) const = default;
};

//! Clustered listening data: items are split into taste clusters, each user
//! has a home cluster it mostly draws from, and popularity inside a cluster
//! (and globally) is Zipf distributed.
struct SynthConfig {
    std::size_t users = 1000;
    std::size_t items = 5000;
    std::size_t clusters = 20;
    std::size_t minItemsPerUser = 10;
    std::size_t maxItemsPerUser = 60;
    double zipfExponent = 1.0;
    double homeShare = 0.8;      //!< probability a pick comes from the home cluster
    double meanPlayCount = 4.0;  //!< play counts are 1 + geometric
    std::uint64_t rngSeed = 0;

    void validate() const {
        if (users == 0 || items == 0) throw std::invalid_argument("synthetic data needs users and items");
        if (clusters == 0 || clusters > items) throw std::invalid_argument("cluster count must lie in [1, items]");
        if (minItemsPerUser == 0 || minItemsPerUser > maxItemsPerUser) {
            throw std::invalid_argument("items per user range is empty");
        }
        if (maxItemsPerUser > items / clusters) {
            throw std::invalid_argument("maxItemsPerUser exceeds the items of one cluster");
        }
        if (!(zipfExponent >= 0.0)) throw std::invalid_argument("zipf exponent must be non-negative");
        if (!(homeShare >= 0.0 && homeShare <= 1.0)) throw std::invalid_argument("home share must lie in [0,1]");
        if (!(meanPlayCount >= 1.0)) throw std::invalid_argument("mean play count must be >= 1");
    }
};

namespace detail {

inline std::string paddedId(char prefix, std::size_t k, std::size_t count) {
    std::string d = std::to_string(k);
    const std::size_t width = std::to_string(count).size();
    return std::string(1, prefix) + std::string(width - d.size(), '0') + d;
}

class ZipfTable {
public:
    ZipfTable(std::size_t n, double s) : cumulative_(n) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r + 1), s);
            cumulative_[r] = total;
        }
    }

    std::size_t sample(Rng& rng) const {
        const double p = rng.uniformOpen01() * cumulative_.back();
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

} // namespace detail

//! Triplets grouped by user in id order, items in draw order.
inline std::vector<Triplet> synthTriplets(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t perCluster = cfg.items / cfg.clusters;
    const detail::ZipfTable local(perCluster, cfg.zipfExponent);
    const detail::ZipfTable global(cfg.items, cfg.zipfExponent);

    // Global popularity order is a fixed shuffle so popular items spread over clusters.
    std::vector<std::size_t> globalOrder(cfg.items);
    for (std::size_t k = 0; k < cfg.items; ++k) globalOrder[k] = k;
    Rng shuffle(cfg.rngSeed, rng_domain::kSynthetic, 0, 0);
    for (std::size_t k = cfg.items; k > 1; --k) std::swap(globalOrder[k - 1], globalOrder[shuffle.below(k)]);

    const double stop = 1.0 / cfg.meanPlayCount; // geometric with mean meanPlayCount, support >= 1
    std::vector<Triplet> out;
    for (std::size_t u = 0; u < cfg.users; ++u) {
        Rng rng(cfg.rngSeed, rng_domain::kSynthetic, 1, u);
        const std::size_t home = rng.below(cfg.clusters);
        const std::size_t degree = cfg.minItemsPerUser + rng.below(cfg.maxItemsPerUser - cfg.minItemsPerUser + 1);
        const std::string user = detail::paddedId('u', u, cfg.users);
        std::set<std::size_t> chosen;
        while (chosen.size() < degree) {
            std::size_t item;
            if (rng.uniform01() < cfg.homeShare) {
                item = home * perCluster + local.sample(rng);
            } else {
                item = globalOrder[global.sample(rng)];
            }
            if (!chosen.insert(item).second) continue;
            std::int64_t plays = 1;
            while (rng.uniform01() >= stop && plays < 1000) ++plays;
            out.push_back({user, detail::paddedId('s', item, cfg.items), plays});
        }
    }
    return out;
}

inline std::string toTsv(const std::vector<Triplet>& triplets) {
    std::string out;
    for (const auto& t : triplets) out += t.user + '\t' + t.item + '\t' + std::to_string(t.playCount) + '\n';
    return out;
}

struct IngestStats {
    std::size_t lines = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

class IngestError : public std::runtime_error {
public:
    IngestError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

//! Folds `user<TAB>item<TAB>playCount` lines through recordInteraction,
//! using the 1-based line number as timestamp. Blank lines are ignored.
inline TrustNetwork ingestTriplets(std::istream& in, IngestStats* stats = nullptr, NetworkLimits limits = {}) {
    TrustNetwork net(limits);
    IngestStats local;
    IngestStats& st = stats ? *stats : local;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw IngestError(lineNo, "expected 3 tab-separated fields");
        }
        const std::string_view user(line.data(), t1);
        const std::string_view item(line.data() + t1 + 1, t2 - t1 - 1);
        const std::string_view count(line.data() + t2 + 1, line.size() - t2 - 1);
        if (!isValidId(user) || !isValidId(item)) throw IngestError(lineNo, "invalid user or item id");
        std::int64_t plays = 0;
        auto res = std::from_chars(count.data(), count.data() + count.size(), plays);
        if (res.ec != std::errc() || res.ptr != count.data() + count.size()) {
            throw IngestError(lineNo, "play count is not an integer");
        }
        ++st.lines;
        if (plays <= 0) {
            ++st.skipped;
            st.warnings.push_back("line " + std::to_string(lineNo) + ": non-positive play count skipped");
            continue;
        }
        net.recordInteraction(NodeId::user(std::string(user)), NodeId::item(std::string(item)), plays,
                              static_cast<Timestamp>(lineNo));
    }
    return net;
}

inline TrustNetwork ingestTriplets(const std::vector<Triplet>& triplets, NetworkLimits limits = {}) {
    TrustNetwork net(limits);
    Timestamp ts = 0;
    for (const auto& t : triplets) {
        ++ts;
        if (t.playCount <= 0) continue;
        net.recordInteraction(NodeId::user(t.user), NodeId::item(t.item), t.playCount, ts);
    }
    return net;
}

} // namespace w3r

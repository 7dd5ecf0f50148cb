#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "w3r/scoring.hpp"

namespace w3r {

//! Sybil influence of the top-x ranking: sum over ranks i < x of (x - i)
//! for every Sybil item at rank i. Ranks are zero-based.
inline std::size_t sitr(const RankedList& ranked, const std::set<std::string>& sybilItems, std::size_t x) {
    if (x == 0) throw std::invalid_argument("SITR needs x >= 1");
    std::size_t total = 0;
    const std::size_t n = std::min(x, ranked.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (sybilItems.count(ranked.entries[i].item)) total += x - i;
    }
    return total;
}

struct RankingComparison {
    std::vector<std::string> listA;
    std::vector<std::string> listB;
    double persistence = 0.9; //!< p
};

//! Extrapolated rank-biased overlap of two (possibly unequal length)
//! rankings without ties. Both empty -> 1, exactly one empty -> 0.
inline double rbo(const RankingComparison& cmp) {
    const double p = cmp.persistence;
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("RBO persistence must lie in (0,1)");
    const auto& a = cmp.listA;
    const auto& b = cmp.listB;
    {
        std::unordered_set<std::string> seenA(a.begin(), a.end()), seenB(b.begin(), b.end());
        if (seenA.size() != a.size() || seenB.size() != b.size()) {
            throw std::invalid_argument("RBO rankings must not contain duplicates");
        }
    }
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;

    const auto& shortList = a.size() <= b.size() ? a : b;
    const auto& longList = a.size() <= b.size() ? b : a;
    const std::size_t s = shortList.size();
    const std::size_t l = longList.size();

    // Overlap X_d maintained incrementally: an element counts once it has
    // been seen in both prefixes.
    std::unordered_set<std::string> pending;
    std::size_t overlap = 0;
    auto see = [&](const std::string& e) {
        if (pending.erase(e)) {
            ++overlap;
        } else {
            pending.insert(e);
        }
    };

    double sum = 0.0;
    double weight = 1.0; // p^d
    std::size_t overlapAtS = 0;
    for (std::size_t d = 1; d <= l; ++d) {
        if (d <= s) {
            if (shortList[d - 1] == longList[d - 1]) {
                ++overlap;
            } else {
                see(shortList[d - 1]);
                see(longList[d - 1]);
            }
        } else {
            // Only the long list advances; elements of the short list that are
            // still pending can now be matched.
            if (pending.erase(longList[d - 1])) ++overlap;
        }
        weight *= p;
        if (d == s) overlapAtS = overlap;
        sum += static_cast<double>(overlap) / static_cast<double>(d) * weight;
        if (d > s) {
            sum += static_cast<double>(overlapAtS) * static_cast<double>(d - s) /
                   (static_cast<double>(d) * static_cast<double>(s)) * weight;
        }
    }
    const double tail = (static_cast<double>(overlap - overlapAtS) / static_cast<double>(l) +
                         static_cast<double>(overlapAtS) / static_cast<double>(s)) *
                        weight;
    return (1.0 - p) / p * sum + tail;
}

inline double rbo(const RankedList& a, const RankedList& b, double persistence = 0.9) {
    return rbo(RankingComparison{a.itemOrder(), b.itemOrder(), persistence});
}

//! True iff `target` is ranked strictly above position x (zero-based rank < x).
inline bool topXContainment(const RankedList& ranked, std::string_view target, std::size_t x) {
    auto rank = ranked.rankOf(target);
    return rank && *rank < x;
}

} // namespace w3r

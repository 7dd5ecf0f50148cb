#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "w3r/w3r.hpp"

namespace w3r::testing {

inline void like(TrustNetwork& net, const std::string& u, const std::string& i, std::int64_t plays, Timestamp ts) {
    net.recordInteraction(NodeId::user(u), NodeId::item(i), plays, ts);
}

inline void trust(TrustNetwork& net, const std::string& a, const std::string& b, double w, Timestamp ts) {
    net.setTrust(NodeId::user(a), NodeId::user(b), w, ts);
}

//! 3 users, 3 items: a trusts b and c, b trusts c, c trusts a.
inline TrustNetwork toy3x3() {
    TrustNetwork net;
    like(net, "a", "x", 3, 1);
    like(net, "a", "y", 1, 2);
    like(net, "b", "x", 1, 3);
    like(net, "b", "y", 2, 4);
    like(net, "b", "z", 1, 5);
    like(net, "c", "y", 1, 6);
    like(net, "c", "z", 4, 7);
    trust(net, "a", "b", 0.6, 8);
    trust(net, "a", "c", 0.4, 9);
    trust(net, "b", "c", 1.0, 10);
    trust(net, "c", "a", 0.5, 11);
    return net;
}

//! 5 users, 6 items with a cycle, a dead-end user and uneven weights.
inline TrustNetwork toy5x6() {
    TrustNetwork net;
    Timestamp ts = 0;
    const std::vector<std::tuple<std::string, std::string, int>> plays{
        {"u1", "i1", 4}, {"u1", "i2", 1}, {"u1", "i3", 2}, {"u2", "i1", 1}, {"u2", "i3", 3}, {"u2", "i4", 2},
        {"u3", "i2", 2}, {"u3", "i4", 1}, {"u3", "i5", 5}, {"u4", "i5", 1}, {"u4", "i6", 3}, {"u5", "i1", 2},
        {"u5", "i6", 1}};
    for (const auto& [u, i, n] : plays) like(net, u, i, n, ++ts);
    const std::vector<std::tuple<std::string, std::string, double>> trusts{
        {"u1", "u2", 0.7}, {"u1", "u3", 0.3}, {"u2", "u3", 0.5}, {"u2", "u5", 0.5}, {"u3", "u4", 1.0},
        {"u4", "u1", 0.2}, {"u5", "u1", 0.9}, {"u5", "u2", 0.1}};
    for (const auto& [a, b, w] : trusts) trust(net, a, b, w, ++ts);
    return net;
}

struct WalkExpectation {
    std::vector<double> visits;      //!< expected visits per item index
    std::vector<double> containment; //!< probability a walk contains the item
};

//! Exact walk statistics by propagating the walk's state distribution
//! (current node, last user, visited-item set) step by step.
inline WalkExpectation exactWalkStats(const GraphSnapshot& snap, const std::vector<double>& startDist, double alpha,
                                      std::size_t maxSteps) {
    const std::size_t items = snap.itemCount();
    WalkExpectation out{std::vector<double>(items, 0.0), std::vector<double>(items, 0.0)};
    using Key = std::tuple<NodeIndex, NodeIndex, std::uint64_t>; // (node, lastUser, mask)
    std::map<Key, double> cur, next;
    for (NodeIndex u = 0; u < startDist.size(); ++u) {
        if (startDist[u] > 0.0) cur[{u, u, 0}] += startDist[u];
    }
    auto finish = [&](std::uint64_t mask, double p) {
        for (std::size_t i = 0; i < items; ++i) {
            if (mask >> i & 1) out.containment[i] += p;
        }
    };
    for (std::size_t step = 1; step <= maxSteps; ++step) {
        next.clear();
        for (const auto& [key, p0] : cur) {
            const auto [node, lastUser, mask] = key;
            double p = p0;
            if (step > 1) {
                finish(mask, p * alpha);
                p *= 1.0 - alpha;
            }
            if (step % 2 == 1) {
                auto links = snap.itemsOf(node);
                double total = 0.0;
                for (const auto& l : links) total += l.weight;
                if (!(total > 0.0)) {
                    finish(mask, p);
                    continue;
                }
                for (const auto& l : links) {
                    if (l.weight <= 0.0) continue;
                    const double q = p * l.weight / total;
                    out.visits[l.target] += q;
                    next[{l.target, node, mask | (std::uint64_t{1} << l.target)}] += q;
                }
            } else {
                double total = 0.0;
                std::vector<std::pair<NodeIndex, double>> cands;
                for (const auto& t : snap.trustOf(lastUser)) {
                    if (auto af = snap.affinity(t.target, node); af && *af > 0.0) {
                        cands.emplace_back(t.target, *af);
                        total += *af;
                    }
                }
                if (cands.empty()) {
                    finish(mask, p);
                    continue;
                }
                for (const auto& [v, af] : cands) next[{v, v, mask}] += p * af / total;
            }
        }
        std::swap(cur, next);
    }
    for (const auto& [key, p] : cur) finish(std::get<2>(key), p);
    return out;
}

//! Start distribution used by runSalsa: query w.p. min(1, deg/D0), else circle.
inline std::vector<double> startDistribution(const GraphSnapshot& snap, NodeIndex query, const WalkConfig& cfg,
                                             const CircleOfTrust& circle) {
    std::vector<double> dist(snap.userCount(), 0.0);
    const double deg = static_cast<double>(snap.itemsOf(query).size());
    const double pUser = std::min(1.0, deg / static_cast<double>(cfg.seedRampD0));
    double total = 0.0;
    for (const auto& [uid, s] : circle.scores()) total += s;
    if (total <= 0.0) {
        dist[query] = 1.0;
        return dist;
    }
    dist[query] += pUser;
    for (const auto& [uid, s] : circle.scores()) dist[*snap.userIndex(uid)] += (1.0 - pUser) * s / total;
    return dist;
}

//! Personalized PageRank with restart c from `root`, by solving
//! v (I - (1-c) A) = e_root, renormalized over non-root users.
inline std::vector<double> pprOracle(const GraphSnapshot& snap, NodeIndex root, double c) {
    const auto n = static_cast<Eigen::Index>(snap.userCount());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (NodeIndex u = 0; u < snap.userCount(); ++u) {
        double total = 0.0;
        for (const auto& l : snap.trustOf(u)) total += l.weight;
        if (total <= 0.0) continue;
        for (const auto& l : snap.trustOf(u)) a(u, l.target) = l.weight / total;
    }
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - (1.0 - c) * a;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    r(root) = 1.0;
    const Eigen::VectorXd v = m.transpose().fullPivLu().solve(r);
    std::vector<double> out(snap.userCount(), 0.0);
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k != root) total += v(k);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k != root && total > 0.0) out[k] = v(k) / total;
    }
    return out;
}

//! Extrapolated RBO evaluated term by term, with every prefix overlap
//! recomputed from scratch.
inline double rboBruteForce(const std::vector<std::string>& a, const std::vector<std::string>& b, double p) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const auto& S = a.size() <= b.size() ? a : b;
    const auto& L = a.size() <= b.size() ? b : a;
    const std::size_t s = S.size(), l = L.size();
    auto overlap = [&](std::size_t d) {
        std::set<std::string> x(S.begin(), S.begin() + static_cast<std::ptrdiff_t>(std::min(d, s)));
        std::size_t n = 0;
        for (std::size_t k = 0; k < d; ++k) n += x.count(L[k]);
        return static_cast<double>(n);
    };
    double sum = 0.0;
    for (std::size_t d = 1; d <= l; ++d) sum += overlap(d) / static_cast<double>(d) * std::pow(p, d);
    const double xs = overlap(s);
    for (std::size_t d = s + 1; d <= l; ++d) {
        sum += xs * static_cast<double>(d - s) / static_cast<double>(s * d) * std::pow(p, d);
    }
    return (1.0 - p) / p * sum + ((overlap(l) - xs) / static_cast<double>(l) + xs / static_cast<double>(s)) * std::pow(p, l);
}

//! Similarity straight from the definitions, on id-keyed maps.
inline double similarityBruteForce(const TrustNetwork& net, const std::string& a, const std::string& b, double tau) {
    const auto& ra = net.users().at(a).affinity;
    const auto& rb = net.users().at(b).affinity;
    auto mean = [](const auto& r) {
        double s = 0.0;
        for (const auto& [i, l] : r) s += l.weight;
        return r.empty() ? 0.0 : s / static_cast<double>(r.size());
    };
    auto common = [&](const auto& x, const auto& y) {
        std::vector<std::string> out;
        for (const auto& [i, l] : x) {
            if (y.count(i)) out.push_back(i);
        }
        return out;
    };
    const auto both = common(ra, rb);
    if (both.empty()) return 0.0;
    std::size_t best = 0;
    for (const auto& [x, rec] : net.users()) {
        if (x != a) best = std::max(best, common(ra, rec.affinity).size());
    }
    const double cf = static_cast<double>(both.size()) / static_cast<double>(best);
    const double ma = mean(ra), mb = mean(rb);
    double num = 0.0, da = 0.0, db = 0.0, diff = 0.0;
    double lo = 1e300, hi = -1e300;
    for (const auto& i : both) {
        const double x = ra.at(i).weight, y = rb.at(i).weight;
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
        diff += std::abs(x - y);
        lo = std::min({lo, x, y});
        hi = std::max({hi, x, y});
    }
    const double pearson = (da == 0.0 || db == 0.0) ? 0.0 : num / std::sqrt(da * db);
    const double range = std::max(hi - lo, 1e-9);
    const double d = std::clamp(1.0 - diff / static_cast<double>(both.size()) / range, 0.0, 1.0);
    return cf * pearson * tau + (1.0 - tau) * d;
}

//! Random network built through the public mutation API.
inline TrustNetwork randomNetwork(std::uint64_t seed, std::size_t ops = 60, NetworkLimits limits = {40, 3}) {
    Rng rng(seed);
    TrustNetwork net(limits);
    const std::size_t users = 2 + rng.below(10);
    const std::size_t items = 1 + rng.below(15);
    for (std::size_t k = 0; k < ops; ++k) {
        const std::string u = "u" + std::to_string(rng.below(users));
        const Timestamp ts = static_cast<Timestamp>(1 + rng.below(1000));
        switch (rng.below(4)) {
        case 0:
        case 1:
            net.recordInteraction(NodeId::user(u), NodeId::item("i" + std::to_string(rng.below(items))),
                                  static_cast<std::int64_t>(1 + rng.below(20)), ts);
            break;
        case 2: {
            const std::string v = "u" + std::to_string(rng.below(users));
            if (v != u) net.setTrust(NodeId::user(u), NodeId::user(v), rng.uniform01() * 2.0, ts);
            break;
        }
        default:
            net.merge(TimedEdge{NodeId::user(u), NodeId::item("i" + std::to_string(rng.below(items))),
                                rng.uniform01() / 3.0 + 1e-7, ts});
        }
    }
    return net;
}

inline WalkSet randomWalkSet(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t users = 1 + rng.below(8);
    const std::size_t items = 1 + rng.below(8);
    auto uids = std::make_shared<std::vector<std::string>>();
    auto iids = std::make_shared<std::vector<std::string>>();
    for (std::size_t k = 0; k < users; ++k) uids->push_back("u" + std::to_string(k));
    for (std::size_t k = 0; k < items; ++k) iids->push_back("i" + std::to_string(k));
    WalkSet walks(uids, iids, NodeIndex{0});
    const std::size_t n = rng.below(30);
    std::vector<NodeIndex> walk;
    for (std::size_t w = 0; w < n; ++w) {
        walk.clear();
        const std::size_t len = 1 + rng.below(12);
        for (std::size_t p = 0; p < len; ++p) {
            walk.push_back(static_cast<NodeIndex>(rng.below(p % 2 == 0 ? users : items)));
        }
        walks.add(walk);
    }
    return walks;
}

//! Item-visit distribution over all item positions of all walks.
inline std::vector<double> empiricalVisits(const WalkSet& walks) {
    std::vector<double> out(walks.itemCount(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < walks.size(); ++k) {
        auto w = walks.walk(k);
        for (std::size_t p = 1; p < w.size(); p += 2) {
            out[w[p]] += 1.0;
            total += 1.0;
        }
    }
    for (auto& v : out) v /= total;
    return out;
}

inline std::vector<double> normalized(std::vector<double> v) {
    double total = 0.0;
    for (double x : v) total += x;
    for (auto& x : v) x /= total;
    return v;
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
    return d;
}

//! Honest synthetic network: clustered triplets plus CF trust.
inline TrustNetwork syntheticNetwork(std::size_t users, std::size_t items, std::size_t clusters, std::uint64_t seed) {
    SynthConfig sc;
    sc.users = users;
    sc.items = items;
    sc.clusters = clusters;
    sc.rngSeed = seed;
    sc.maxItemsPerUser = std::min(sc.maxItemsPerUser, items / clusters);
    sc.minItemsPerUser = std::min(sc.minItemsPerUser, sc.maxItemsPerUser);
    auto triplets = synthTriplets(sc);
    auto net = ingestTriplets(triplets);
    return genTestNetwork(std::move(net), CfConfig{}, static_cast<Timestamp>(triplets.size() + 1));
}

//! 10 replicas with disjoint edge sets and shuffled distinct timestamps.
inline SimState disjointReplicas(std::size_t replicas, std::size_t edgesEach, std::uint64_t seed) {
    Rng rng(seed, 0x7e57, 0);
    std::vector<Timestamp> stamps(replicas * edgesEach);
    for (std::size_t k = 0; k < stamps.size(); ++k) stamps[k] = static_cast<Timestamp>(k + 1);
    for (std::size_t k = stamps.size(); k > 1; --k) std::swap(stamps[k - 1], stamps[rng.below(k)]);
    SimState st;
    std::size_t next = 0;
    for (std::size_t r = 0; r < replicas; ++r) {
        TrustNetwork net;
        const std::string owner = "r" + std::to_string(r);
        for (std::size_t k = 0; k < edgesEach; ++k) {
            const Timestamp ts = stamps[next++];
            if (k % 3 == 2) {
                net.merge(TimedEdge{NodeId::user(owner), NodeId::user(owner + "f" + std::to_string(k)), 0.5, ts});
            } else {
                net.merge(TimedEdge{NodeId::user(owner), NodeId::item(owner + "s" + std::to_string(k)), 0.25, ts});
            }
        }
        st.replicas.push_back(std::move(net));
    }
    return st;
}

} // namespace w3r::testing

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "w3r/metrics.hpp"
#include "w3r/pipeline.hpp"
#include "w3r/rng.hpp"
#include "w3r/sybil.hpp"
#include "w3r/trust_network.hpp"

namespace w3r {

enum class Suite { LeaveOneOut, DecaySweep, SingleSybil, GigaSybil };

inline std::string_view toString(Suite s) {
    switch (s) {
    case Suite::LeaveOneOut: return "leave-one-out";
    case Suite::DecaySweep: return "decay-sweep";
    case Suite::SingleSybil: return "single-sybil";
    case Suite::GigaSybil: return "giga-sybil";
    }
    return "?";
}

inline Suite parseSuite(std::string_view s) {
    if (s == "leave-one-out") return Suite::LeaveOneOut;
    if (s == "decay-sweep") return Suite::DecaySweep;
    if (s == "single-sybil") return Suite::SingleSybil;
    if (s == "giga-sybil") return Suite::GigaSybil;
    throw std::invalid_argument("unknown suite '" + std::string(s) + "'");
}

struct ExperimentConfig {
    Suite suite = Suite::LeaveOneOut;
    std::size_t sampleUsers = 100;
    std::vector<double> alphaGrid;
    std::vector<double> betaGrid;
    QueryConfig query;
    std::uint64_t rngSeed = 0;

    // SingleSybil
    AttackStrategy strategy = AttackStrategy::Linear;
    std::vector<std::size_t> sybilCounts{8, 16, 32, 64};
    std::size_t sybilItemsPerSybil = 1;
    // GigaSybil: alpha grid runs at beta 0, beta grid at gigaAlpha
    double sybilFraction = 0.5;
    double gigaAlpha = 0.1;

    double rboPersistence = 0.9;

    void validate(const TrustNetwork& net) const {
        if (sampleUsers == 0) throw std::invalid_argument("sampleUsers must be positive");
        if (sampleUsers > net.userCount()) throw std::invalid_argument("sampleUsers exceeds the user count");
        for (double a : alphaGrid) {
            if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("alpha grid values must lie in [0,1)");
        }
        for (double b : betaGrid) {
            if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("beta grid values must lie in [0,1)");
        }
        switch (suite) {
        case Suite::LeaveOneOut:
            if (!alphaGrid.empty() || !betaGrid.empty()) {
                throw std::invalid_argument("leave-one-out takes no decay grid");
            }
            break;
        case Suite::DecaySweep:
        case Suite::GigaSybil:
            if (alphaGrid.empty() && betaGrid.empty()) throw std::invalid_argument("suite needs an alpha or beta grid");
            break;
        case Suite::SingleSybil:
            if (alphaGrid.empty() || betaGrid.empty()) {
                throw std::invalid_argument("single-sybil needs both an alpha and a beta grid");
            }
            if (sybilCounts.empty()) throw std::invalid_argument("single-sybil needs sybil counts");
            if (strategy == AttackStrategy::Giga) throw std::invalid_argument("single-sybil runs linear or parallel");
            break;
        }
    }
};

namespace detail {

//! `count` distinct users chosen uniformly from `pool` (kept in pool order).
inline std::vector<std::string> sampleIds(std::vector<std::string> pool, std::size_t count, Rng& rng) {
    count = std::min(count, pool.size());
    for (std::size_t k = 0; k < count; ++k) std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
    pool.resize(count);
    return pool;
}

inline std::vector<std::string> allUsers(const TrustNetwork& net) {
    std::vector<std::string> out;
    for (const auto& [uid, rec] : net.users()) out.push_back(uid);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Leave-one-out.

struct LeaveOneOutRow {
    std::string user;
    std::string removedItem;
    std::optional<std::size_t> rank; //!< among items the user does not hold; none if unranked
    bool coldStart = false;
};

struct LeaveOneOutReport {
    std::vector<LeaveOneOutRow> rows;

    std::string toCsv() const {
        std::string out = "userId,removedItem,rank,top100,top1000,top10000\n";
        for (const auto& r : rows) {
            out += r.user + ',' + r.removedItem + ',';
            if (r.coldStart) {
                out += "cold-start,,,\n";
                continue;
            }
            out += r.rank ? std::to_string(*r.rank) : std::string("-1");
            for (std::size_t x : {100u, 1000u, 10000u}) out += (r.rank && *r.rank < x) ? ",1" : ",0";
            out += '\n';
        }
        return out;
    }

    //! Share of non-cold-start rows whose removed item ranks below `x`.
    double containment(std::size_t x) const {
        std::size_t hit = 0, total = 0;
        for (const auto& r : rows) {
            if (r.coldStart) continue;
            ++total;
            if (r.rank && *r.rank < x) ++hit;
        }
        return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
    }
};

//! Per sampled user: drop one uniformly chosen affinity edge, rank, and
//! record where the dropped item lands among items the user does not hold.
inline LeaveOneOutReport runLeaveOneOut(const TrustNetwork& net, const ExperimentConfig& cfg) {
    cfg.validate(net);
    std::vector<std::string> pool;
    for (const auto& [uid, rec] : net.users()) {
        if (!rec.affinity.empty()) pool.push_back(uid);
    }
    Rng pick(cfg.rngSeed, rng_domain::kExperiment, 0);
    auto users = detail::sampleIds(pool, cfg.sampleUsers, pick);
    std::sort(users.begin(), users.end());

    LeaveOneOutReport report;
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& user = users[k];
        const auto& aff = net.users().at(user).affinity;
        Rng rng(cfg.rngSeed, rng_domain::kExperiment, 1, k);
        auto it = aff.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(rng.below(aff.size())));
        const std::string removed = it->first;

        TrustNetwork probe = net;
        probe.removeAffinity(user, removed);
        if (!probe.hasUser(user)) probe.addUser(user);
        const GraphSnapshot snap(probe);
        const auto result = recommend(snap, user, cfg.query);

        LeaveOneOutRow row{user, removed, std::nullopt, result.coldStart()};
        if (!row.coldStart) {
            const auto& held = probe.users().at(user).affinity;
            std::size_t rank = 0;
            for (const auto& e : result.ranked.entries) {
                if (e.item == removed) {
                    row.rank = rank;
                    break;
                }
                if (!held.count(e.item)) ++rank;
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Decay sweep.

struct DecaySweepRow {
    std::string user;
    std::string decayKind; //!< "alpha" or "beta"
    double decayValue = 0.0;
    double rbo = 0.0;
};

struct DecaySweepReport {
    std::vector<DecaySweepRow> rows;

    std::string toCsv() const {
        std::string out = "userId,decayKind,decayValue,rbo\n";
        for (const auto& r : rows) {
            out += r.user + ',' + r.decayKind + ',' + formatWeight(r.decayValue) + ',' + formatWeight(r.rbo) + '\n';
        }
        return out;
    }

    double meanRbo(std::string_view kind, double value) const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (r.decayKind == kind && r.decayValue == value) {
                sum += r.rbo;
                ++n;
            }
        }
        return n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
};

//! Per sampled user: RBO of each alpha-grid ranking (beta 0) and each
//! beta-grid ranking (alpha 0) against the alpha = beta = 0 ranking.
inline DecaySweepReport runDecaySweep(const TrustNetwork& net, const ExperimentConfig& cfg) {
    cfg.validate(net);
    Rng pick(cfg.rngSeed, rng_domain::kExperiment, 0);
    auto users = detail::sampleIds(detail::allUsers(net), cfg.sampleUsers, pick);
    std::sort(users.begin(), users.end());

    const GraphSnapshot snap(net);
    DecaySweepReport report;
    for (const auto& user : users) {
        const NodeIndex idx = *snap.userIndex(user);
        const auto circle = computeCircleOfTrust(snap, idx, cfg.query.circle);
        WalkConfig w0 = cfg.query.walk;
        w0.alphaDecay = 0.0;
        DecayConfig d0 = cfg.query.decay;
        d0.betaDecay = 0.0;
        const WalkSet base = runSalsa(snap, idx, w0, circle);
        const RankedList baseline = rankItems(base, d0, cfg.query.betaMode);
        for (double a : cfg.alphaGrid) {
            WalkConfig wa = w0;
            wa.alphaDecay = a;
            const RankedList r = rankItems(runSalsa(snap, idx, wa, circle), d0, cfg.query.betaMode);
            report.rows.push_back({user, "alpha", a, rbo(r, baseline, cfg.rboPersistence)});
        }
        for (double b : cfg.betaGrid) {
            DecayConfig db = d0;
            db.betaDecay = b;
            const RankedList r = rankItems(base, db, cfg.query.betaMode);
            report.rows.push_back({user, "beta", b, rbo(r, baseline, cfg.rboPersistence)});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Single-gateway Sybil attacks.

struct SingleSybilReport {
    std::vector<GainRow> rows; //!< ordered by (S, alpha, beta)

    std::string toCsv() const {
        std::string out = "strategy,S,alpha,beta,meanSybilScore\n";
        for (const auto& r : rows) {
            out += std::string(toString(r.strategy)) + ',' + std::to_string(r.sybilCount) + ',' + formatWeight(r.alpha) +
                   ',' + formatWeight(r.beta) + ',' + formatWeight(r.meanSybilScore) + '\n';
        }
        return out;
    }

    const GainRow* find(std::size_t s, double alpha, double beta) const {
        for (const auto& r : rows) {
            if (r.sybilCount == s && r.alpha == alpha && r.beta == beta) return &r;
        }
        return nullptr;
    }
};

struct QueryTraitorPair {
    std::string query;
    std::string traitor;
};

//! Query users drawn uniformly from users that trust someone holding an
//! item; each gets a uniformly chosen such trusted neighbor as traitor.
inline std::vector<QueryTraitorPair> sampleTraitorPairs(const TrustNetwork& net, std::size_t count, std::uint64_t seed) {
    std::vector<std::string> pool;
    for (const auto& [uid, rec] : net.users()) {
        for (const auto& [dst, link] : rec.trust) {
            if (!net.users().at(dst).affinity.empty()) {
                pool.push_back(uid);
                break;
            }
        }
    }
    Rng pick(seed, rng_domain::kExperiment, 0);
    auto queries = detail::sampleIds(pool, count, pick);
    std::sort(queries.begin(), queries.end());
    std::vector<QueryTraitorPair> pairs;
    for (std::size_t k = 0; k < queries.size(); ++k) {
        std::vector<std::string> options;
        for (const auto& [dst, link] : net.users().at(queries[k]).trust) {
            if (!net.users().at(dst).affinity.empty()) options.push_back(dst);
        }
        Rng rng(seed, rng_domain::kExperiment, 2, k);
        pairs.push_back({queries[k], options[rng.below(options.size())]});
    }
    return pairs;
}

inline std::vector<QueryConfig> gridConfigs(const QueryConfig& base, const std::vector<double>& alphas,
                                            const std::vector<double>& betas) {
    std::vector<QueryConfig> out;
    for (double a : alphas) {
        for (double b : betas) {
            QueryConfig q = base;
            q.walk.alphaDecay = a;
            q.decay.betaDecay = b;
            out.push_back(q);
        }
    }
    return out;
}

//! For each S, every sampled traitor mounts the attack once and the gain is
//! measured for the query user that trusts it; rows average over pairs.
inline SingleSybilReport runSingleSybil(const TrustNetwork& net, const ExperimentConfig& cfg) {
    cfg.validate(net);
    const auto pairs = sampleTraitorPairs(net, cfg.sampleUsers, cfg.rngSeed);
    if (pairs.empty()) throw std::invalid_argument("no user trusts a user with affinity edges");
    const auto configs = gridConfigs(cfg.query, cfg.alphaGrid, cfg.betaGrid);

    std::map<std::string, std::vector<std::string>> byTraitor;
    for (const auto& p : pairs) byTraitor[p.traitor].push_back(p.query);

    SingleSybilReport report;
    for (std::size_t s : cfg.sybilCounts) {
        std::vector<GainRow> rows;
        for (const auto& q : configs) {
            rows.push_back({cfg.strategy, s, q.walk.alphaDecay, q.decay.betaDecay, q.decay.betaThreshold, 0.0, 0.0, {}});
        }
        for (const auto& [traitor, queries] : byTraitor) {
            AttackSpec spec;
            spec.strategy = cfg.strategy;
            spec.traitor = traitor;
            spec.sybilCount = s;
            spec.sybilItemsPerSybil = cfg.sybilItemsPerSybil;
            const auto attacked = mountAttack(net, spec);
            const auto gain = measureAttackGain(net, attacked.network, attacked.ledger, queries, configs, cfg.strategy, s);
            for (std::size_t c = 0; c < rows.size(); ++c) {
                rows[c].perQuery.insert(rows[c].perQuery.end(), gain.rows[c].perQuery.begin(),
                                        gain.rows[c].perQuery.end());
                rows[c].meanSitr100 += gain.rows[c].meanSitr100 * static_cast<double>(queries.size());
            }
        }
        for (auto& r : rows) {
            double sum = 0.0;
            for (double v : r.perQuery) sum += v;
            r.meanSybilScore = sum / static_cast<double>(pairs.size());
            r.meanSitr100 /= static_cast<double>(pairs.size());
            report.rows.push_back(std::move(r));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Giga attack.

struct GigaSybilReport {
    std::vector<GainRow> rows; //!< alpha grid (beta 0), then beta grid (alpha = gigaAlpha)
    SybilLedger ledger;

    std::string toCsv() const {
        std::string out = "alpha,beta,meanSybilScore,meanSITR100\n";
        for (const auto& r : rows) {
            out += formatWeight(r.alpha) + ',' + formatWeight(r.beta) + ',' + formatWeight(r.meanSybilScore) + ',' +
                   formatWeight(r.meanSitr100) + '\n';
        }
        return out;
    }
};

inline GigaSybilReport runGigaSybil(const TrustNetwork& net, const ExperimentConfig& cfg) {
    cfg.validate(net);
    AttackSpec spec;
    spec.strategy = AttackStrategy::Giga;
    spec.sybilFraction = cfg.sybilFraction;
    spec.sybilItemsPerSybil = cfg.sybilItemsPerSybil;
    spec.rngSeed = cfg.rngSeed;
    auto attacked = mountGigaAttack(net, spec);

    std::vector<std::string> honest;
    for (const auto& [uid, rec] : net.users()) {
        if (!attacked.ledger.sybilUsers.count(uid) && !rec.affinity.empty()) honest.push_back(uid);
    }
    Rng pick(cfg.rngSeed, rng_domain::kExperiment, 0);
    auto queries = detail::sampleIds(honest, cfg.sampleUsers, pick);
    std::sort(queries.begin(), queries.end());

    std::vector<QueryConfig> configs;
    for (double a : cfg.alphaGrid) {
        auto g = gridConfigs(cfg.query, {a}, {0.0});
        configs.insert(configs.end(), g.begin(), g.end());
    }
    for (double b : cfg.betaGrid) {
        auto g = gridConfigs(cfg.query, {cfg.gigaAlpha}, {b});
        configs.insert(configs.end(), g.begin(), g.end());
    }
    auto gain = measureAttackGain(net, attacked.network, attacked.ledger, queries, configs, AttackStrategy::Giga,
                                  attacked.ledger.sybilUsers.size());
    return {std::move(gain.rows), std::move(attacked.ledger)};
}

} // namespace w3r

// w3r: trust-graph recommender and Sybil-attack workbench.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "w3r/w3r.hpp"

using namespace w3r;

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kColdStart = 4;

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void writeOutput(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + path + "'");
}

TrustNetwork loadNetwork(const std::string& path) { return deserialize(readFile(path)); }

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

//! Flags shared by every command that runs queries.
struct QueryFlags {
    std::uint64_t seed = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double tauBeta = 0.5;
    std::size_t walks = 10000;
    std::size_t maxSteps = 39;
    std::size_t seedRamp = 10;
    std::size_t segments = 10000;
    bool vanilla = false;
    std::string betaMode = "precomputed";

    void attach(CLI::App* app, bool withVanilla) {
        app->add_option("--alpha", alpha, "alpha decay: per-step walk termination probability")->capture_default_str();
        app->add_option("--beta", beta, "beta decay applied to low-diversity items")->capture_default_str();
        app->add_option("--tau-beta", tauBeta, "diversity threshold for beta decay")->capture_default_str();
        app->add_option("--walks", walks, "walks per query")->capture_default_str();
        app->add_option("--max-steps", maxSteps, "maximum walk length (odd)")->capture_default_str();
        app->add_option("--seed-ramp", seedRamp, "D0: start at the query user w.p. min(1, deg/D0)")->capture_default_str();
        app->add_option("--segments", segments, "circle-of-trust walk segments")->capture_default_str();
        app->add_option("--beta-mode", betaMode, "precomputed or on-the-fly")
            ->check(CLI::IsMember({"precomputed", "on-the-fly"}))
            ->capture_default_str();
        if (withVanilla) app->add_flag("--vanilla", vanilla, "uniform, untrusted SALSA baseline");
    }

    QueryConfig config() const {
        QueryConfig q;
        q.walk.alphaDecay = alpha;
        q.walk.walkCount = walks;
        q.walk.maxSteps = maxSteps;
        q.walk.rngSeed = seed;
        q.walk.seedRampD0 = seedRamp;
        q.walk.vanilla = vanilla;
        q.decay.betaDecay = beta;
        q.decay.betaThreshold = tauBeta;
        q.circle.segmentCount = segments;
        q.circle.rngSeed = seed;
        q.betaMode = betaMode == "on-the-fly" ? BetaMode::OnTheFly : BetaMode::Precomputed;
        q.walk.validate();
        q.decay.validate();
        q.circle.validate();
        return q;
    }
};

std::vector<double> parseGrid(const std::string& s) {
    std::vector<double> out;
    for (const auto& v : splitList(s)) {
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != v.size()) throw std::invalid_argument("bad grid value '" + v + "'");
        out.push_back(d);
    }
    return out;
}

std::vector<std::size_t> parseCounts(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& v : splitList(s)) {
        if (v.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("bad count '" + v + "'");
        }
        out.push_back(static_cast<std::size_t>(std::stoull(v)));
    }
    return out;
}

void printNetworkStats(const TrustNetwork& net) {
    std::cerr << "users " << net.userCount() << "  items " << net.itemCount() << "  affinity edges "
              << net.affinityEdgeCount() << "  trust edges " << net.trustEdgeCount() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sybil-resistant trust-graph recommender and attack workbench"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
        sub->add_option("--out", out, "output path (default stdout)");
    };

    // ingest
    auto* ingest = app.add_subcommand("ingest", "fold user<TAB>item<TAB>playCount triplets into a network");
    std::string inputPath;
    NetworkLimits limits;
    ingest->add_option("--input", inputPath, "triplet file")->required();
    ingest->add_option("--window", limits.windowCapacity, "user-item edge window n")->capture_default_str();
    ingest->add_option("--fanout", limits.trustFanout, "trust fanout K")->capture_default_str();
    common(ingest);

    // gen-network
    auto* gen = app.add_subcommand("gen-network", "install CF trust edges for every user");
    std::string networkPath;
    CfConfig cf;
    gen->add_option("--network", networkPath, "serialized network")->required();
    gen->add_option("--tau-sim", cf.mixWeight, "similarity mix weight")->capture_default_str();
    gen->add_option("--top-m", cf.topM, "trust edges per user")->capture_default_str();
    common(gen);

    // recommend
    auto* rec = app.add_subcommand("recommend", "rank items for one user");
    std::string user;
    std::size_t top = 100;
    QueryFlags recFlags;
    rec->add_option("--network", networkPath, "serialized network")->required();
    rec->add_option("--user", user, "query user")->required();
    rec->add_option("--top", top, "rows to print (0 = all)")->capture_default_str();
    recFlags.attach(rec, true);
    common(rec);

    // gossip-sim
    auto* gossip = app.add_subcommand("gossip-sim", "simulate replica synchronization by edge gossip");
    GossipConfig gcfg;
    std::size_t replicas = 10;
    gossip->add_option("--network", networkPath, "network whose edges are dealt round-robin to replicas")->required();
    gossip->add_option("--replicas", replicas, "replica count")->capture_default_str();
    gossip->add_option("--peers", gcfg.fanout, "peers contacted per replica per round (f)")->capture_default_str();
    gossip->add_option("--edges-per-message", gcfg.edgesPerMessage, "m")->capture_default_str();
    gossip->add_option("--temperature", gcfg.softmaxTemperature, "softmax temperature T")->capture_default_str();
    gossip->add_option("--rounds", gcfg.rounds, "rounds to run")->capture_default_str();
    common(gossip);

    // attack
    auto* attack = app.add_subcommand("attack", "mount a Sybil attack and measure its gain");
    AttackSpec spec;
    std::string strategy = "linear";
    std::string gainPath, ledgerPath;
    std::size_t querySample = 20;
    QueryFlags atkFlags;
    attack->add_option("--network", networkPath, "serialized network")->required();
    attack->add_option("--strategy", strategy, "linear, parallel or giga")
        ->check(CLI::IsMember({"linear", "parallel", "giga"}))
        ->capture_default_str();
    attack->add_option("--traitor", spec.traitor, "converted honest user (linear, parallel)");
    attack->add_option("--sybils", spec.sybilCount, "S (linear, parallel)")->capture_default_str();
    attack->add_option("--fraction", spec.sybilFraction, "share of users converted (giga)");
    attack->add_option("--items-per-sybil", spec.sybilItemsPerSybil, "fresh items per Sybil")->capture_default_str();
    attack->add_option("--timestamp", spec.timestamp, "attack edge timestamp (default: newest + 1)");
    attack->add_option("--gain", gainPath, "write the gain report CSV here");
    attack->add_option("--ledger", ledgerPath, "write the Sybil ledger here");
    attack->add_option("--queries", querySample, "query users for the gain report")->capture_default_str();
    atkFlags.attach(attack, false);
    common(attack);

    // experiment
    auto* exp = app.add_subcommand("experiment", "run an experiment suite");
    ExperimentConfig ecfg;
    std::string suite, alphaGrid, betaGrid, sybilCounts, expStrategy = "linear";
    QueryFlags expFlags;
    exp->add_option("--network", networkPath, "serialized network")->required();
    exp->add_option("--suite", suite, "leave-one-out, decay-sweep, single-sybil or giga-sybil")
        ->required()
        ->check(CLI::IsMember({"leave-one-out", "decay-sweep", "single-sybil", "giga-sybil"}));
    exp->add_option("--sample", ecfg.sampleUsers, "sampled users")->capture_default_str();
    exp->add_option("--alpha-grid", alphaGrid, "comma-separated alpha values");
    exp->add_option("--beta-grid", betaGrid, "comma-separated beta values");
    exp->add_option("--sybil-counts", sybilCounts, "comma-separated S values (single-sybil)");
    exp->add_option("--strategy", expStrategy, "linear or parallel (single-sybil)")
        ->check(CLI::IsMember({"linear", "parallel"}))
        ->capture_default_str();
    exp->add_option("--items-per-sybil", ecfg.sybilItemsPerSybil, "fresh items per Sybil")->capture_default_str();
    exp->add_option("--fraction", ecfg.sybilFraction, "converted share (giga-sybil)")->capture_default_str();
    exp->add_option("--giga-alpha", ecfg.gigaAlpha, "alpha used along the beta grid (giga-sybil)")->capture_default_str();
    exp->add_option("--rbo-p", ecfg.rboPersistence, "RBO persistence (decay-sweep)")->capture_default_str();
    expFlags.attach(exp, true);
    common(exp);

    // synth-data
    auto* synth = app.add_subcommand("synth-data", "generate clustered synthetic play-count triplets");
    SynthConfig scfg;
    synth->add_option("--users", scfg.users)->capture_default_str();
    synth->add_option("--items", scfg.items)->capture_default_str();
    synth->add_option("--clusters", scfg.clusters)->capture_default_str();
    synth->add_option("--min-items", scfg.minItemsPerUser, "items per user, lower bound")->capture_default_str();
    synth->add_option("--max-items", scfg.maxItemsPerUser, "items per user, upper bound")->capture_default_str();
    synth->add_option("--zipf", scfg.zipfExponent, "popularity exponent")->capture_default_str();
    synth->add_option("--home-share", scfg.homeShare, "share of picks from the home cluster")->capture_default_str();
    synth->add_option("--mean-plays", scfg.meanPlayCount, "mean play count")->capture_default_str();
    common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (ingest->parsed()) {
            std::ifstream in(inputPath, std::ios::binary);
            if (!in) throw DataError("cannot open '" + inputPath + "'");
            IngestStats stats;
            const auto net = ingestTriplets(in, &stats, limits);
            for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
            std::cerr << "lines " << stats.lines << "  skipped " << stats.skipped << '\n';
            printNetworkStats(net);
            writeOutput(out, serialize(net));
        } else if (gen->parsed()) {
            auto net = loadNetwork(networkPath);
            const Timestamp ts = net.maxTimestamp() + 1;
            net = genTestNetwork(std::move(net), cf, ts);
            printNetworkStats(net);
            writeOutput(out, serialize(net));
        } else if (rec->parsed()) {
            recFlags.seed = seed;
            const auto cfg = recFlags.config();
            const auto net = loadNetwork(networkPath);
            if (!net.hasUser(user)) throw DataError("unknown user '" + user + "'");
            const GraphSnapshot snap(net);
            const auto result = recommend(snap, user, cfg);
            if (result.coldStart()) throw ColdStartError(user);
            writeOutput(out, toCsv(result.ranked, top));
        } else if (gossip->parsed()) {
            gcfg.rngSeed = seed;
            gcfg.validate();
            if (replicas == 0) throw std::invalid_argument("need at least one replica");
            const auto net = loadNetwork(networkPath);
            SimState st;
            st.replicas.assign(replicas, TrustNetwork(net.limits()));
            const auto edges = net.edges();
            for (std::size_t k = 0; k < edges.size(); ++k) st.replicas[k % replicas].merge(edges[k]);
            const auto report = runGossip(st, gcfg);
            if (auto r = report.convergedAt()) {
                std::cerr << "converged at round " << *r << '\n';
            } else {
                std::cerr << "not converged after " << gcfg.rounds << " rounds\n";
            }
            writeOutput(out, report.toCsv());
        } else if (attack->parsed()) {
            atkFlags.seed = seed;
            const auto cfg = atkFlags.config();
            spec.strategy = parseStrategy(strategy);
            spec.rngSeed = seed;
            const auto net = loadNetwork(networkPath);
            if (spec.strategy != AttackStrategy::Giga && !net.hasUser(spec.traitor)) {
                throw DataError("unknown traitor '" + spec.traitor + "'");
            }
            const auto outcome = mountAttack(net, spec);
            printNetworkStats(outcome.network);
            writeOutput(out, serialize(outcome.network));
            if (!ledgerPath.empty()) {
                std::string text = "kind,id\n";
                for (const auto& u : outcome.ledger.sybilUsers) text += "user," + u + '\n';
                for (const auto& i : outcome.ledger.sybilItems) text += "item," + i + '\n';
                writeOutput(ledgerPath, text);
            }
            if (!gainPath.empty()) {
                std::vector<std::string> pool;
                for (const auto& [uid, r] : net.users()) {
                    if (outcome.ledger.sybilUsers.count(uid) || uid == spec.traitor || r.affinity.empty()) continue;
                    if (spec.strategy != AttackStrategy::Giga && !r.trust.count(spec.traitor)) continue;
                    pool.push_back(uid);
                }
                Rng pick(seed, rng_domain::kExperiment, 0);
                auto queries = detail::sampleIds(pool, querySample, pick);
                std::sort(queries.begin(), queries.end());
                const std::size_t s = spec.strategy == AttackStrategy::Giga ? outcome.ledger.sybilUsers.size()
                                                                            : spec.sybilCount;
                const auto gain = measureAttackGain(net, outcome.network, outcome.ledger, queries, {cfg}, spec.strategy, s);
                writeOutput(gainPath, gain.toCsv());
            }
        } else if (exp->parsed()) {
            expFlags.seed = seed;
            ecfg.query = expFlags.config();
            ecfg.rngSeed = seed;
            ecfg.suite = parseSuite(suite);
            ecfg.alphaGrid = parseGrid(alphaGrid);
            ecfg.betaGrid = parseGrid(betaGrid);
            if (!sybilCounts.empty()) ecfg.sybilCounts = parseCounts(sybilCounts);
            ecfg.strategy = parseStrategy(expStrategy);
            const auto net = loadNetwork(networkPath);
            std::string csv;
            switch (ecfg.suite) {
            case Suite::LeaveOneOut: csv = runLeaveOneOut(net, ecfg).toCsv(); break;
            case Suite::DecaySweep: csv = runDecaySweep(net, ecfg).toCsv(); break;
            case Suite::SingleSybil: csv = runSingleSybil(net, ecfg).toCsv(); break;
            case Suite::GigaSybil: csv = runGigaSybil(net, ecfg).toCsv(); break;
            }
            writeOutput(out, csv);
        } else if (synth->parsed()) {
            scfg.rngSeed = seed;
            writeOutput(out, toTsv(synthTriplets(scfg)));
        }
    } catch (const ColdStartError& e) {
        std::cerr << "cold start: " << e.what() << "; seed the user with affinity edges (see gen-network)\n";
        return kColdStart;
    } catch (const ColdUserError& e) {
        std::cerr << "cold start: " << e.what() << '\n';
        return kColdStart;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return 0;
}

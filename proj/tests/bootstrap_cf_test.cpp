#include <gtest/gtest.h>

#include "support.hpp"

using namespace w3r;
using namespace w3r::testing;

namespace {

TrustNetwork ratedNetwork(const std::map<std::string, std::map<std::string, double>>& ratings) {
    TrustNetwork net;
    Timestamp ts = 0;
    for (const auto& [u, row] : ratings) {
        for (const auto& [i, w] : row) net.merge(TimedEdge{NodeId::user(u), NodeId::item(i), w, ++ts});
    }
    return net;
}

} // namespace

TEST(Pearson, identicalNegatedOrthogonal) {
    // b rates x and y equally, so its centered overlap vector is constant.
    auto net = ratedNetwork({{"a", {{"x", 0.6}, {"y", 0.4}}},
                             {"b", {{"x", 0.4}, {"y", 0.4}, {"z", 0.2}}},
                             {"c", {{"x", 0.6}, {"y", 0.4}}},
                             {"d", {{"x", 0.4}, {"y", 0.6}}}});
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    const NodeIndex a = *snap.userIndex("a"), b = *snap.userIndex("b"), c = *snap.userIndex("c"), d = *snap.userIndex("d");
    EXPECT_NEAR(pearsonSim(a, c, view).value, 1.0, 1e-12);
    EXPECT_NEAR(pearsonSim(a, d, view).value, -1.0, 1e-12);
    EXPECT_NEAR(pearsonSim(a, b, view).value, 0.0, 1e-12);
    EXPECT_TRUE(pearsonSim(a, b, view).hasOverlap);
}

TEST(Pearson, noOverlapAndConstantRatings) {
    auto net = ratedNetwork({{"a", {{"x", 0.5}, {"y", 0.5}}}, {"b", {{"z", 1.0}}}, {"c", {{"x", 0.3}, {"w", 0.7}}}});
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    const auto r = pearsonSim(*snap.userIndex("a"), *snap.userIndex("b"), view);
    EXPECT_FALSE(r.hasOverlap);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(pearsonSim(*snap.userIndex("a"), *snap.userIndex("c"), view).value, 0.0);
}

TEST(Pearson, centeredRatingsAverageToZero) {
    const auto net = randomNetwork(4, 200, NetworkLimits{1000, 5});
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    for (NodeIndex u = 0; u < snap.userCount(); ++u) {
        if (snap.itemsOf(u).empty()) continue;
        double sum = 0.0;
        for (const auto& l : snap.itemsOf(u)) sum += view.centered(u, l.weight);
        EXPECT_NEAR(sum / static_cast<double>(snap.itemsOf(u).size()), 0.0, 1e-9);
    }
}

TEST(CommonPreference, ratios) {
    std::map<std::string, double> ten, five, other;
    for (int k = 0; k < 10; ++k) ten["i" + std::to_string(k)] = 0.1;
    for (int k = 0; k < 5; ++k) five["i" + std::to_string(k)] = 0.2;
    other["z"] = 1.0;
    auto net = ratedNetwork({{"a", ten}, {"max", ten}, {"half", five}, {"none", other}});
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    const NodeIndex a = *snap.userIndex("a");
    EXPECT_DOUBLE_EQ(commonPreference(a, *snap.userIndex("max"), view), 1.0);
    EXPECT_DOUBLE_EQ(commonPreference(a, *snap.userIndex("half"), view), 0.5);
    EXPECT_DOUBLE_EQ(commonPreference(a, *snap.userIndex("none"), view), 0.0);
    // Asymmetric: half's best overlap is 5.
    EXPECT_DOUBLE_EQ(commonPreference(*snap.userIndex("half"), a, view), 1.0);
}

TEST(Similarity, mixExamples) {
    auto net = ratedNetwork({{"a", {{"x", 0.7}, {"y", 0.3}}},
                             {"same", {{"x", 0.7}, {"y", 0.3}}},
                             {"far", {{"x", 0.3}, {"y", 0.7}}}});
    const GraphSnapshot snap(net);
    const RatingView view(snap);
    const NodeIndex a = *snap.userIndex("a");
    EXPECT_NEAR(similarity(a, *snap.userIndex("same"), CfConfig{0.5, 5}, view), 1.0, 1e-12);
    EXPECT_NEAR(similarity(a, *snap.userIndex("far"), CfConfig{0.0, 5}, view), 0.0, 1e-12);
    const NodeIndex far = *snap.userIndex("far");
    EXPECT_DOUBLE_EQ(similarity(a, far, CfConfig{1.0, 5}, view),
                     commonPreference(a, far, view) * pearsonSim(a, far, view).value);
}

TEST(Similarity, matchesBruteForceTable) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto net = randomNetwork(seed, 150, NetworkLimits{1000, 5});
        const GraphSnapshot snap(net);
        const RatingView view(snap);
        for (double tau : {0.0, 0.5, 1.0}) {
            for (NodeIndex a = 0; a < snap.userCount(); ++a) {
                if (snap.itemsOf(a).empty()) continue;
                const auto row = similarityRow(a, CfConfig{tau, 5}, view);
                for (const auto& s : row) {
                    ASSERT_NEAR(s.similarity, similarityBruteForce(net, snap.userId(a), snap.userId(s.user), tau), 1e-12);
                    ASSERT_NEAR(s.similarity, similarity(a, s.user, CfConfig{tau, 5}, view), 1e-12);
                }
                for (std::size_t k = 1; k < row.size(); ++k) ASSERT_GE(row[k - 1].similarity, row[k].similarity);
            }
        }
    }
}

TEST(Bootstrap, singlePartner) {
    auto net = ratedNetwork({{"new", {{"x", 0.6}, {"y", 0.4}}}, {"old", {{"x", 0.6}, {"y", 0.4}}}, {"loner", {{"z", 1.0}}}});
    EXPECT_EQ(bootstrapTrust(net, "new", CfConfig{}, 100), 1u);
    EXPECT_NE(net.trust("new", "old"), nullptr);
    EXPECT_EQ(net.trust("new", "loner"), nullptr);
}

TEST(Bootstrap, topMOrderedByBruteForce) {
    SynthConfig sc;
    sc.users = 40;
    sc.items = 60;
    sc.clusters = 2;
    sc.minItemsPerUser = 5;
    sc.maxItemsPerUser = 20;
    sc.rngSeed = 3;
    auto net = ingestTriplets(synthTriplets(sc));
    const std::string a = net.users().begin()->first;
    std::vector<std::pair<double, std::string>> table;
    for (const auto& [b, rec] : net.users()) {
        if (b != a) table.emplace_back(similarityBruteForce(net, a, b, 0.5), b);
    }
    std::sort(table.begin(), table.end(), [](const auto& l, const auto& r) {
        return l.first != r.first ? l.first > r.first : l.second < r.second;
    });
    ASSERT_GT(table[4].first, 0.0);
    EXPECT_EQ(bootstrapTrust(net, a, CfConfig{0.5, 5}, 1000000), 5u);
    const auto& out = net.users().at(a).trust;
    ASSERT_EQ(out.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        ASSERT_TRUE(out.count(table[k].second)) << table[k].second;
        EXPECT_NEAR(out.at(table[k].second).weight, table[k].first, 1e-11);
    }
}

TEST(Bootstrap, coldUserAndCandidates) {
    auto net = ratedNetwork({{"a", {{"x", 1.0}}}, {"b", {{"x", 1.0}}}, {"c", {{"x", 1.0}}}});
    net.addUser("cold");
    EXPECT_THROW(bootstrapTrust(net, "cold", CfConfig{}, 9), ColdUserError);
    EXPECT_THROW(bootstrapTrust(net, "ghost", CfConfig{}, 9), std::invalid_argument);
    const std::set<std::string> allowed{"c"};
    EXPECT_EQ(bootstrapTrust(net, "a", CfConfig{}, 9, &allowed), 1u);
    EXPECT_NE(net.trust("a", "c"), nullptr);
    EXPECT_EQ(net.trust("a", "b"), nullptr);
}

TEST(Bootstrap, divisiveItemsByVariance) {
    auto net = ratedNetwork({{"a", {{"calm", 0.5}, {"split", 0.9}, {"solo", 0.1}}},
                             {"b", {{"calm", 0.5}, {"split", 0.1}}},
                             {"c", {{"calm", 0.5}, {"split", 0.5}}}});
    const GraphSnapshot snap(net);
    EXPECT_EQ(divisiveItems(snap, 2), (std::vector<std::string>{"split", "calm"}));
}

TEST(GenTestNetwork, installsTrustForEveryUserWithinFanout) {
    auto net = ratedNetwork({{"a", {{"x", 0.6}, {"y", 0.4}}}, {"b", {{"x", 0.6}, {"y", 0.4}}}, {"alone", {{"z", 1.0}}}});
    const auto out = genTestNetwork(net, CfConfig{}, 50);
    EXPECT_NE(out.trust("a", "b"), nullptr);
    EXPECT_NE(out.trust("b", "a"), nullptr);
    EXPECT_TRUE(out.users().at("alone").trust.empty());

    const auto big = syntheticNetwork(60, 200, 4, 5);
    for (const auto& [uid, rec] : big.users()) {
        ASSERT_LE(rec.trust.size(), big.limits().trustFanout);
        ASSERT_EQ(rec.trust.count(uid), 0u);
    }
}

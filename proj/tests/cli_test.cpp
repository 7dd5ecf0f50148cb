#include <gtest/gtest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / ("w3r-cli-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        ASSERT_EQ(run("synth-data --users 60 --items 200 --clusters 3 --seed 4 --out " + path("t.tsv")), 0);
        ASSERT_EQ(run("ingest --input " + path("t.tsv") + " --out " + path("raw.w3r")), 0);
        ASSERT_EQ(run("gen-network --network " + path("raw.w3r") + " --out " + path("net.w3r")), 0);
    }

    static void TearDownTestSuite() { fs::remove_all(dir_); }

    static std::string path(const std::string& name) { return (dir_ / name).string(); }

    static int run(const std::string& args) {
        const std::string cmd = std::string(W3R_CLI_PATH) + " " + args + " 2>" + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string slurp(const std::string& name) {
        std::ifstream in(path(name), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    static std::string header(const std::string& name) {
        const auto text = slurp(name);
        return text.substr(0, text.find('\n'));
    }

    static void put(const std::string& name, const std::string& text) {
        std::ofstream(path(name), std::ios::binary) << text;
    }

    static fs::path dir_;
};

fs::path Cli::dir_;

} // namespace

TEST_F(Cli, pipelineProducesNetworkAndRanking) {
    EXPECT_EQ(slurp("net.w3r").substr(0, 6), "W3R 1\n");
    ASSERT_EQ(run("recommend --network " + path("net.w3r") + " --user u00 --walks 2000 --top 5 --out " + path("r.csv")),
              0);
    const auto csv = slurp("r.csv");
    EXPECT_EQ(header("r.csv"), "rank,itemId,score,betaFactor");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST_F(Cli, recommendIsByteIdenticalOnRepeat) {
    const std::string args = "recommend --network " + path("net.w3r") +
                             " --user u07 --alpha 0.1 --beta 0.8 --tau-beta 0.5 --walks 3000 --seed 9 --top 0 --out ";
    ASSERT_EQ(run(args + path("a.csv")), 0);
    ASSERT_EQ(run(args + path("b.csv")), 0);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    ASSERT_EQ(run(args + path("v.csv") + " --vanilla"), 0);
    EXPECT_NE(slurp("a.csv"), slurp("v.csv"));
}

TEST_F(Cli, usageErrorsExitTwo) {
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("recommend --network " + path("net.w3r")), 2);
    EXPECT_EQ(run("recommend --bogus"), 2);
    EXPECT_EQ(run("recommend --network " + path("net.w3r") + " --user u00 --alpha 1.5"), 2);
    EXPECT_EQ(run("experiment --network " + path("net.w3r") + " --suite decay-sweep"), 2);
    EXPECT_EQ(run("attack --network " + path("net.w3r") + " --strategy giga --fraction 0"), 2);
}

TEST_F(Cli, dataErrorsExitThree) {
    EXPECT_EQ(run("recommend --network " + path("missing.w3r") + " --user u00"), 3);
    put("bad.w3r", "W3R 9\n");
    EXPECT_EQ(run("recommend --network " + path("bad.w3r") + " --user u00"), 3);
    EXPECT_EQ(run("recommend --network " + path("net.w3r") + " --user nobody"), 3);
    put("bad.tsv", "u\ts\t1\nbroken line\n");
    EXPECT_EQ(run("ingest --input " + path("bad.tsv") + " --out " + path("x.w3r")), 3);
    EXPECT_NE(slurp("stderr.txt").find("line 2"), std::string::npos);
    EXPECT_EQ(run("attack --network " + path("net.w3r") + " --traitor nobody --out " + path("x.w3r")), 3);
}

TEST_F(Cli, coldStartExitsFour) {
    put("cold.w3r", "W3R 1\n2 1 0 1 10 5\nU 0 a\nU 1 b\nI 0 x\nA 1 0 1 1\n");
    EXPECT_EQ(run("recommend --network " + path("cold.w3r") + " --user a"), 4);
    EXPECT_NE(slurp("stderr.txt").find("cold start"), std::string::npos);
}

TEST_F(Cli, gossipAttackAndExperimentCsv) {
    ASSERT_EQ(run("gossip-sim --network " + path("net.w3r") + " --replicas 4 --rounds 3 --out " + path("g.csv")), 0);
    EXPECT_EQ(header("g.csv"), "round,meanPairwiseDivergence,maxDivergence");

    ASSERT_EQ(run("attack --network " + path("net.w3r") + " --strategy giga --fraction 0.25 --walks 500 --out " +
                  path("atk.w3r") + " --gain " + path("gain.csv") + " --ledger " + path("ledger.csv")),
              0);
    EXPECT_EQ(header("gain.csv"), "strategy,S,alpha,beta,tauBeta,meanSybilScore,meanSITR100");
    EXPECT_EQ(header("ledger.csv"), "kind,id");

    ASSERT_EQ(run("experiment --network " + path("net.w3r") +
                  " --suite single-sybil --sample 3 --alpha-grid 0 --beta-grid 0,0.8 --sybil-counts 2,4 --walks 500 --out " +
                  path("s.csv")),
              0);
    EXPECT_EQ(header("s.csv"), "strategy,S,alpha,beta,meanSybilScore");
    ASSERT_EQ(run("experiment --network " + path("net.w3r") +
                  " --suite leave-one-out --sample 5 --walks 500 --vanilla --out " + path("l.csv")),
              0);
    EXPECT_EQ(header("l.csv"), "userId,removedItem,rank,top100,top1000,top10000");
}

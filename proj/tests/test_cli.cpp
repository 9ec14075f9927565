#include "cgame/cli.hpp"
#include "cgame/errors.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cgame::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
    int code;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("cgame_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Result call(std::vector<std::string> args, bool with_out = true) const {
        args.insert(args.begin(), "cgame");
        if (with_out) {
            args.push_back("--out");
            args.push_back(dir.string());
        }
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::string slurp(const std::string& name) const {
        std::ifstream f(dir / name, std::ios::binary);
        return {std::istreambuf_iterator<char>(f), {}};
    }

    fs::path dir;
};

const std::vector<std::string> kModelFlags = {"--mu", "-0.5", "--sigma", "0.25", "--r", "1",
                                         "--alpha", "0.5", "--k", "1"};

std::vector<std::string> with_model_flags(std::vector<std::string> tail) {
    auto v = kModelFlags;
    v.insert(v.begin(), tail.front());
    v.insert(v.end(), tail.begin() + 1, tail.end());
    return v;
}

TEST(CliHelpers, Round12) {
    EXPECT_EQ(round12(0.1234567890123456), 0.123456789012);
    EXPECT_EQ(round12(-1234.56789012345678), -1234.56789012);
    EXPECT_EQ(round12(0.0), 0.0);
}

TEST_F(CliTest, SolveReferenceExample) {
    const auto r = call(with_model_flags({"solve", "--c1", "0.0165", "--c2", "0.015"}));
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_NEAR(doc["theta_star"].get<double>(), 0.0439, 1e-3);
    EXPECT_NEAR(doc["z2"].get<double>(), 0.1480, 1e-3);
    for (const char* key : {"z1", "q", "w", "u1"}) EXPECT_TRUE(doc.contains(key)) << key;
    for (const char* key : {"i_level", "j_gap_c2", "j_gap_c1", "u1_boundary"}) {
        EXPECT_LT(doc["residuals"][key].get<double>(), 1e-9) << key;
    }
    EXPECT_TRUE(doc["conditions"]["optimal_u"].get<bool>());
    EXPECT_TRUE(doc["conditions"]["q_range"].get<bool>());
    EXPECT_TRUE(doc["conditions"]["ordering"].get<bool>());
    EXPECT_NEAR(doc["pure"]["beta"].get<double>(), 7.60e-4, 0.02 * 7.60e-4);
    EXPECT_TRUE(doc["pure"]["valid"].get<bool>());
    EXPECT_EQ(slurp("solve.json"), r.out);
}

TEST_F(CliTest, NumbersCarryTwelveSignificantDigits) {
    const auto r = call({"solve"});
    ASSERT_EQ(r.code, kSuccess);
    const auto doc = json::parse(r.out);
    for (const char* key : {"theta_star", "z1", "z2", "q", "w", "u1"}) {
        const double v = doc[key].get<double>();
        EXPECT_EQ(v, round12(v)) << key;
    }
}

TEST_F(CliTest, SolveFailureConditions) {
    auto r = call(with_model_flags({"solve", "--c1", "0.018", "--c2", "0.015"}));
    EXPECT_EQ(r.code, kFailure);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "OptimalU");
    EXPECT_FALSE(r.err.empty());

    r = call(with_model_flags({"solve", "--c1", "0.015", "--c2", "0.015"}));
    EXPECT_EQ(r.code, kFailure);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "symmetric-degenerate");

    r = call({"solve", "--c1", "0.03", "--c2", "0.015"});
    EXPECT_EQ(r.code, kFailure);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "no-root");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(call({"solve", "--bogus", "1"}).code, kUsage);
    EXPECT_EQ(call({"solve", "--mu", "abc"}).code, kUsage);
    EXPECT_EQ(call({"solve", "--game", "chess"}).code, kUsage);
    EXPECT_EQ(call({}).code, kUsage);
    const auto r = call({"solve", "--mu", "0.2"});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "parameter");
    EXPECT_EQ(call({"solve", "--c2", "-1"}).code, kUsage);
    EXPECT_EQ(call({"--help"}, false).code, kSuccess);
}

TEST_F(CliTest, SolveSingleAndImpulseGames) {
    auto r = call({"solve", "--game", "single"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    auto doc = json::parse(r.out);
    EXPECT_GT(doc["gap"].get<double>(), 0.0);
    EXPECT_LT(doc["player1"]["theta"].get<double>(), doc["player2"]["theta"].get<double>());

    r = call({"solve", "--game", "single", "--c1", "0.015"});
    ASSERT_EQ(r.code, kSuccess);
    EXPECT_EQ(json::parse(r.out)["gap"].get<double>(), 0.0);

    r = call({"solve", "--game", "impulse", "--scale", "2"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    doc = json::parse(r.out);
    EXPECT_GT(doc["z"].get<double>(), 0.42);
    EXPECT_EQ(doc["scale"].get<double>(), 2.0);
}

TEST_F(CliTest, JsonRoundTripRevalidates) {
    const auto r = call({"solve", "--c1", "0.016", "--c2", "0.014"});
    ASSERT_EQ(r.code, kSuccess);
    ModelParams p;
    const auto eq = equilibrium_from_json(json::parse(r.out), p);
    EXPECT_TRUE(check_equilibrium(eq, p).ok());
    EXPECT_EQ(p.mu, -0.5);

    const auto c = call({"check", (dir / "solve.json").string()}, false);
    EXPECT_EQ(c.code, kSuccess) << c.out;
    EXPECT_TRUE(json::parse(c.out)["ok"].get<bool>());

    auto doc = json::parse(r.out);
    doc["q"] = 0.5;
    std::ofstream(dir / "tampered.json") << doc.dump();
    EXPECT_EQ(call({"check", (dir / "tampered.json").string()}, false).code, kFailure);
    doc.erase("z1");
    EXPECT_THROW(equilibrium_from_json(doc, p), ConfigError);
    std::ofstream(dir / "broken.json") << "{not json";
    EXPECT_EQ(call({"check", (dir / "broken.json").string()}, false).code, kUsage);
}

TEST_F(CliTest, SweepRows) {
    const auto r = call({"sweep", "--c1-from", "0.0151", "--c1-to", "0.0180", "--c1-step", "0.0005"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "c1,valid,theta_star,z1,z2,q");
    double last_valid = 0.0, prev_q = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const double c1 = std::stod(line.substr(0, line.find(',')));
        const bool valid = line[line.find(',') + 1] == '1';
        if (valid) {
            const double q = std::stod(line.substr(line.rfind(',') + 1));
            EXPECT_GT(q, prev_q);
            prev_q = q;
            last_valid = c1;
        } else {
            EXPECT_GT(c1, 0.01729);
        }
    }
    EXPECT_EQ(rows, 6);
    EXPECT_NEAR(last_valid, 0.0171, 1e-9);
    EXPECT_EQ(slurp("sweep.csv"), r.out);

    const auto empty = call({"sweep", "--c1-from", "0.02", "--c1-to", "0.016"});
    EXPECT_EQ(empty.code, kSuccess);
    EXPECT_EQ(empty.out, "c1,valid,theta_star,z1,z2,q\n");
    EXPECT_EQ(call({"sweep", "--c1-from", "0.016"}).code, kUsage);
    EXPECT_EQ(call({"sweep", "--c1-from", "0.016", "--c1-to", "0.017", "--c1-step", "0"}).code, kUsage);
}

TEST_F(CliTest, CompareTable) {
    auto r = call({"compare", "--c1", "0.0165", "--c2", "0.015"});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    std::istringstream in(r.out);
    std::string beta, negi, header, line;
    std::getline(in, beta);
    std::getline(in, negi);
    std::getline(in, header);
    EXPECT_NEAR(std::stod(beta.substr(beta.find('=') + 1)), 7.60e-4, 0.02 * 7.60e-4);
    EXPECT_NEAR(std::stod(negi.substr(negi.find('=') + 1)), 2.95e-4, 0.02 * 2.95e-4);
    EXPECT_EQ(header, "x,V_M,V_P,V_S");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        double v[4];
        std::istringstream cells(line);
        for (double& x : v) {
            std::string cell;
            std::getline(cells, cell, ',');
            x = std::stod(cell);
        }
        EXPECT_LT(v[1], v[2]) << line;
        EXPECT_LE(v[2], v[3]) << line;
    }
    EXPECT_EQ(rows, 50);

    r = call({"compare", "--points", "1", "--x-from", "0.1"});
    ASSERT_EQ(r.code, kSuccess);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
    EXPECT_EQ(call({"compare", "--points", "0"}).code, kUsage);

    r = call({"compare", "--c1", "0.06", "--c2", "0.05"});
    EXPECT_EQ(r.code, kFailure);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "pure-suff");
}

TEST_F(CliTest, SimulateWritesOutputsDeterministically) {
    const std::vector<std::string> args = {"simulate", "--n-paths", "200", "--dt", "0.005",
                                           "--seed", "7"};
    const auto a = call(args);
    ASSERT_EQ(a.code, kSuccess) << a.err;
    const auto files = {"path.csv", "events.csv", "payoff.json"};
    std::vector<std::string> first;
    for (const auto* f : files) first.push_back(slurp(f));
    const auto b = call(args);
    ASSERT_EQ(b.code, kSuccess);
    EXPECT_EQ(a.out, b.out);
    int i = 0;
    for (const auto* f : files) EXPECT_EQ(slurp(f), first[i++]) << f;

    const auto doc = json::parse(a.out);
    for (const char* key : {"mean1", "mean2", "se1", "se2"}) EXPECT_TRUE(doc.contains(key)) << key;
    EXPECT_TRUE(doc["analytic"].contains("U1"));
    EXPECT_TRUE(doc["analytic"].contains("V2"));
    EXPECT_LE(std::abs(doc["z_scores"]["player1"].get<double>()), 4.0);
    EXPECT_LE(std::abs(doc["z_scores"]["player2"].get<double>()), 4.0);
    EXPECT_EQ(doc["config"]["t_max"].get<double>(), 20.0);
    EXPECT_EQ(first[0].rfind("t,x\n", 0), 0u);
}

TEST_F(CliTest, SimulateRejectsSinglePath) {
    const auto r = call({"simulate", "--n-paths", "1"});
    EXPECT_EQ(r.code, kUsage);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "config");
    EXPECT_EQ(call({"simulate", "--n-paths", "10", "--dt", "0.5"}).code, kUsage);
}

TEST_F(CliTest, ConfigFileSuppliesOptions) {
    std::ofstream(dir / "run.cfg") << "mu=-0.5\nsigma=0.25\nr=1\nalpha=0.5\nk=1\nc1=0.018\nc2=0.015\n";
    const auto r = call({"solve", "--config", (dir / "run.cfg").string()});
    EXPECT_EQ(r.code, kFailure);
    EXPECT_EQ(json::parse(r.out)["error"]["condition"], "OptimalU");
    // Flags override the file.
    EXPECT_EQ(call({"solve", "--config", (dir / "run.cfg").string(), "--c1", "0.0165"}).code, kSuccess);
}

TEST_F(CliTest, BinaryExitCodes) {
    const std::string exe = CGAME_EXE;
    const std::string sink = " --out " + dir.string() + " >/dev/null 2>&1";
    auto status = [&](const std::string& args) {
        const int s = std::system((exe + " " + args + sink).c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("solve --c1 0.0165 --c2 0.015"), 0);
    EXPECT_EQ(status("solve --c1 0.018 --c2 0.015"), 1);
    EXPECT_EQ(status("solve --c1 0.015 --c2 0.015"), 1);
    EXPECT_EQ(status("solve --sigma x"), 2);
}

}  // namespace
}  // namespace cgame::cli

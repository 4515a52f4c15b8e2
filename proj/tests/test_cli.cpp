#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "rqv/model_io.hpp"

namespace fs = std::filesystem;
using rqv::read_text_file;
using rqv::cli::run;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("rqv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

constexpr const char* kRace = R"({"states":[{"id":0,"labels":[]},{"id":1,"labels":["a"]},{"id":2,"labels":["b"]}],
  "initial":0,"transitions":[{"from":0,"to":1,"rate":{"lo":1,"hi":2}},{"from":0,"to":2,"rate":3}]})";

}  // namespace

TEST(CliFormat, Numbers) {
    EXPECT_EQ(rqv::cli::format_number(0.1), "0.1");
    EXPECT_EQ(rqv::cli::format_number(1e-300), "1e-300");
    EXPECT_EQ(rqv::cli::format_number(std::numeric_limits<double>::infinity()), "inf");
    const auto g = rqv::cli::make_grid(1, 1000, 4, true);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g.front(), 1.0);
    EXPECT_EQ(g.back(), 1000.0);
    EXPECT_NEAR(g[1], 10.0, 1e-12);
}

TEST_F(CliTest, CheckIntervalModel) {
    const auto model = write("race.json", kRace);
    const auto out = (dir_ / "o").string();
    EXPECT_EQ(call({"--out", out, "check", "--model", model.string(), "--property", R"(P<=0.3 [ F "a" ])"}), 0);
    EXPECT_NE(out_.str().find("[0.25, 0.4]"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("indeterminate"), std::string::npos);
    const auto report = nlohmann::json::parse(read_text_file(dir_ / "o" / "check.json"));
    EXPECT_NEAR(report.at("lo").get<double>(), 0.25, 1e-12);
    const auto manifest = nlohmann::json::parse(read_text_file(dir_ / "o" / "manifest.json"));
    EXPECT_EQ(manifest.at("command"), "check");
    EXPECT_EQ(manifest.at("exit_code"), 0);
    EXPECT_EQ(manifest.at("tool_version"), rqv::cli::kToolVersion);
}

TEST_F(CliTest, ExitCodes) {
    const auto model = write("race.json", kRace);
    const auto out = (dir_ / "o").string();
    EXPECT_EQ(call({"--out", out, "check", "--model", model.string(), "--property", R"(P=? [ F "nope" ])"}), 2);
    EXPECT_EQ(call({"--out", out, "check", "--model", model.string(), "--property", "garbage"}), 2);
    EXPECT_EQ(call({"--out", out, "check", "--model", (dir_ / "missing.json").string(), "--property",
                    R"(P=? [ F "a" ])"}),
              2);
    EXPECT_EQ(call({"--bogus"}), 2);
    const auto prior = write("prior.json", R"({"epsilons":[0,0.01,"inf"],"thetas":[0.3,0.7]})");
    EXPECT_EQ(call({"--out", out, "bipp", "--prior", prior.string()}), 2);
    const auto manifest = nlohmann::json::parse(read_text_file(dir_ / "o" / "manifest.json"));
    EXPECT_EQ(manifest.at("exit_code"), 2);

    // A chain that never leaves its recurrent pair has no absorbing behaviour.
    const auto loop = write("loop.json", R"({"states":[{"id":0,"labels":[]},{"id":1,"labels":[]},{"id":2,"labels":["f"]}],
      "initial":0,"transitions":[{"from":0,"to":1,"rate":1},{"from":1,"to":0,"rate":1}],
      "state_rewards":{"time":{"0":1,"1":1}}})");
    EXPECT_EQ(call({"--out", out, "check", "--model", loop.string(), "--property", R"(R{"time"}=? [ F "f" ])"}), 3);
}

TEST_F(CliTest, BippCurve) {
    const auto prior = write("prior.json", R"({"epsilons":[0,0.01,0.02,"inf"],"thetas":[0.3,0.3,0.4]})");
    const auto out = (dir_ / "o").string();
    ASSERT_EQ(call({"--out", out, "bipp", "--prior", prior.string(), "--t", "1,10,100"}), 0) << err_.str();
    const auto csv = read_text_file(dir_ / "o" / "bipp.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,lambda_l,lambda_u,method");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    EXPECT_TRUE(fs::exists(dir_ / "o" / "bipp.svg"));
}

TEST_F(CliTest, IpspCurve) {
    const auto prior = write("gamma.json", R"({"t0":[1000,1000],"lambda0":[2.9,3.1]})");
    const auto out = (dir_ / "o").string();
    ASSERT_EQ(call({"--out", out, "--seed", "4", "ipsp", "--prior", prior.string(), "--rate", "3", "--points", "5"}), 0)
        << err_.str();
    const auto csv = read_text_file(dir_ / "o" / "ipsp.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,n,lower,upper,mle");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST_F(CliTest, MissionReplayIsByteIdentical) {
    const auto config = write("mission.json", R"({"k":3,"seed":12})");
    const auto a = (dir_ / "a").string();
    const auto b = (dir_ / "b").string();
    ASSERT_EQ(call({"--out", a, "--no-timing", "mission", "run", "--config", config.string(), "--runs", "2"}), 0)
        << err_.str();
    ASSERT_EQ(call({"--out", b, "replay", (dir_ / "a" / "manifest.json").string()}), 0) << err_.str();
    for (const char* f : {"run_0/decisions.csv", "run_0/events.csv", "run_0/outcome.json", "run_1/events.csv",
                          "aggregate.csv", "mission_config.json"}) {
        EXPECT_EQ(read_text_file(dir_ / "a" / f), read_text_file(dir_ / "b" / f)) << f;
    }
    const auto manifest = nlohmann::json::parse(read_text_file(dir_ / "b" / "manifest.json"));
    EXPECT_EQ(manifest.at("command"), "mission run");
    EXPECT_EQ(manifest.at("output_directory"), b);
}

TEST_F(CliTest, Fig4PanelsAndLowerBoundZeros) {
    const auto out = (dir_ / "o").string();
    ASSERT_EQ(call({"--out", out, "eval", "fig4", "--points", "30"}), 0) << err_.str();
    std::size_t panel_a = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "o" / "fig4")) {
        const auto name = e.path().filename().string();
        if (name.rfind("fig4a_", 0) == 0 && e.path().extension() == ".csv") ++panel_a;
    }
    EXPECT_EQ(panel_a, 4u);
    for (const auto& e : fs::directory_iterator(dir_ / "o" / "fig4")) {
        const auto name = e.path().filename().string();
        if (name.rfind("fig4d_", 0) != 0 || e.path().extension() != ".csv") continue;
        std::istringstream in(read_text_file(e.path()));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            EXPECT_EQ(line.substr(c1 + 1, c2 - c1 - 1), "0") << name << ": " << line;
        }
    }
}

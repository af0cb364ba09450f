#include "ppfe/report.hpp"
#include "ppfe/scenario.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ppfe;
namespace fs = std::filesystem;

namespace {

const std::string kCli = PPFE_CLI_PATH;
const fs::path kScenarios = fs::path(PPFE_SOURCE_DIR) / "scenarios";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ppfe_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kScalar = R"({
  "model": {"A": 0.9, "Q": 1, "x0": [0], "P0": 1},
  "sensors": [{"C": 1, "R": 1}],
  "channel": {"gamma": [0.9], "gamma_e": [0.5]},
  "codec": {"a": [2], "delta": [0.01]},
  "horizon": 30, "trials": 4, "seed": 12
})";

}  // namespace

TEST(Scenario, ParsesExplicitModel) {
  const Scenario sc = parse_scenario(kScalar);
  EXPECT_EQ(sc.model.A(0, 0), 0.9);
  EXPECT_EQ(sc.horizon, 30u);
  EXPECT_EQ(sc.trials, 4u);
  EXPECT_EQ(sc.seed, 12u);
  EXPECT_EQ(sc.channel.wiretap, std::vector<double>{0.5});
  EXPECT_EQ(sc.codec.scale, 1.0);
  EXPECT_EQ(sc.policy, EavesdropperPolicy::OwnHistory);
}

TEST(Scenario, PresetWithOverrides) {
  const Scenario sc = parse_scenario(R"({"preset": "three-tank-groupA3", "trials": 7,
    "eavesdropper_policy": "overhear-ack", "legit_decode_noise": "realized",
    "codec": {"s": -1}})");
  EXPECT_EQ(sc.trials, 7u);
  EXPECT_EQ(sc.codec.growth, (std::vector<double>{0.5, 0.5, 10.0}));
  EXPECT_EQ(sc.codec.scale, -1.0);
  EXPECT_EQ(sc.policy, EavesdropperPolicy::OverhearAck);
  EXPECT_EQ(sc.legit_noise, DecodeNoise::Realized);
  EXPECT_EQ(sc.sensors.size(), 3u);
}

TEST(Scenario, OutcomeOverrides) {
  const Scenario w = parse_scenario(R"({"preset": "three-tank-groupA1", "horizon": 10,
    "outcome_override": {"worst_case": {"channel": 2, "k_bar": 4}}})");
  ASSERT_TRUE(w.outcome_override.has_value());
  EXPECT_EQ(*w.outcome_override, build_worst_case(3, 10, 1, 4));
  const Scenario e = parse_scenario(R"({"model": {"A": 1, "Q": 1}, "sensors": [{"C": 1, "R": 1}],
    "channel": {"gamma": [1], "gamma_e": [1]}, "codec": {"a": [1], "delta": [0.1]},
    "horizon": 3, "outcome_override": {"gamma": [[1, 0, 1]], "gamma_e": [[0, 0, 1]]}})");
  EXPECT_TRUE(e.outcome_override->received(0, 0));
  EXPECT_FALSE(e.outcome_override->received(0, 1));
  EXPECT_TRUE(e.outcome_override->intercepted(0, 2));
}

TEST(Scenario, RejectsBadInput) {
  const char* bad[] = {
      "not json",
      "[]",
      R"({"trials": 3})",
      R"({"preset": "three-tank-groupA1", "trials": 0})",
      R"({"preset": "three-tank-groupA1", "horizon": -4})",
      R"({"preset": "three-tank-groupA1", "eavesdropper_policy": "psychic"})",
      R"({"preset": "three-tank-groupA1", "codec": {"a": [1, 2]}})",
      R"({"preset": "three-tank-groupA1", "codec": {"delta": [0, 0.1, 0.1]}})",
      R"({"preset": "three-tank-groupA1", "channel": {"gamma": [1.5, 1, 1], "gamma_e": [1, 1, 1]}})",
      R"({"model": {"A": [[1, 0], [0]]}})",
      R"({"model": {"A": 1, "Q": -1}, "sensors": [{"C": 1, "R": 1}]})",
      R"({"preset": "three-tank-groupA1", "horizon": 5,
          "outcome_override": {"worst_case": {"channel": 4, "k_bar": 1}}})",
      R"({"preset": "three-tank-groupA1", "horizon": 5,
          "outcome_override": {"worst_case": {"channel": 1, "k_bar": 5}}})",
      R"({"preset": "no-such-preset"})",
  };
  for (const char* text : bad) EXPECT_THROW(parse_scenario(text), ScenarioError) << text;
  EXPECT_THROW(load_scenario_file("/nonexistent/file.json"), ScenarioError);
}

TEST(Scenario, ShippedFilesLoad) {
  for (const auto& entry : fs::directory_iterator(kScenarios)) {
    EXPECT_NO_THROW(load_scenario_file(entry.path().string())) << entry.path();
  }
}

TEST(Report, ConditionsJsonRoundTrip) {
  const ConditionsReport r = evaluate_conditions(scenario_preset("three-tank-groupA1"));
  const auto j = nlohmann::json::parse(conditions_json(r));
  EXPECT_NEAR(j.at("capacity").get<double>(), r.capacity.capacity, 0.0);
  EXPECT_EQ(j.at("mahler_measure").get<double>(), 1.0);
  EXPECT_TRUE(j.at("capacity_condition").get<bool>());
  EXPECT_TRUE(j.at("pbh").at("holds").get<bool>());
  EXPECT_EQ(nlohmann::json::parse(j.dump()), j);

  Scenario lossless = scenario_preset("three-tank-groupA1");
  lossless.channel.authorized = {1.0, 0.5, 0.5};
  EXPECT_EQ(nlohmann::json::parse(conditions_json(evaluate_conditions(lossless)))
                .at("capacity")
                .get<std::string>(),
            "inf");
}

TEST(Cli, SimulateWritesFilesAndIsDeterministic) {
  const fs::path a = fresh_dir("sim_a"), b = fresh_dir("sim_b");
  ASSERT_EQ(run("simulate --preset three-tank-groupA1 --seed 7 --trials 10 --horizon 80 --out " +
                a.string()),
            0);
  ASSERT_EQ(run("simulate --preset three-tank-groupA1 --seed 7 --trials 10 --horizon 80 --workers 3 --out " +
                b.string()),
            0);
  for (const char* f : {"mse.csv", "events.csv", "summary.txt"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "mse.csv").substr(0, 60),
            "k,mse_legit,mse_eve,mse_eve_saturated,trace_emp_cov,trace_bo");
}

TEST(Cli, SeedPrecedence) {
  const fs::path flag = fresh_dir("seed_flag"), env = fresh_dir("seed_env"),
                 other = fresh_dir("seed_other");
  const std::string base = "simulate --preset three-tank-groupA1 --trials 3 --horizon 40 ";
  ASSERT_EQ(run(base + "--seed 21 --out " + flag.string(), "PPFE_SEED=5"), 0);
  ASSERT_EQ(run(base + "--out " + env.string(), "PPFE_SEED=21"), 0);
  ASSERT_EQ(run(base + "--out " + other.string(), "PPFE_SEED=22"), 0);
  EXPECT_EQ(slurp(flag / "mse.csv"), slurp(env / "mse.csv"));
  EXPECT_NE(slurp(flag / "mse.csv"), slurp(other / "mse.csv"));
}

TEST(Cli, UsageErrorsExitTwo) {
  const fs::path out = fresh_dir("usage");
  EXPECT_EQ(run("simulate --preset three-tank-groupA1 --trials 0 --out " + out.string()), 2);
  EXPECT_EQ(run("simulate --preset three-tank-groupA1 --horizon 0 --out " + out.string()), 2);
  EXPECT_EQ(run("simulate --out " + out.string()), 2);
  EXPECT_EQ(run("simulate --preset three-tank-groupA1 --scenario x.json"), 2);
  EXPECT_EQ(run("simulate --preset no-such-preset"), 2);
  EXPECT_EQ(run("simulate --scenario /nonexistent.json"), 2);
  EXPECT_EQ(run("bound --preset three-tank-groupA1 --tol 0 --out " + out.string()), 2);
  EXPECT_EQ(run("simulate --preset three-tank-groupA1 --trials abc"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST(Cli, RuntimeErrorExitsOne) {
  // Two copies of a nearly noiseless sensor make the fused innovation covariance singular.
  const fs::path dir = fresh_dir("runtime");
  fs::create_directories(dir);
  std::ofstream(dir / "singular.json") << R"({
    "model": {"A": 1, "Q": 1, "x0": [0], "P0": 1},
    "sensors": [{"C": 1, "R": 1e-20}, {"C": 1, "R": 1e-20}],
    "channel": {"gamma": [1, 1], "gamma_e": [1, 1]},
    "codec": {"a": [1, 1], "delta": [0.01, 0.01], "transparent": true},
    "horizon": 5, "trials": 1})";
  EXPECT_EQ(run("simulate --scenario " + (dir / "singular.json").string() + " --out " +
                (dir / "out").string()),
            1);
}

TEST(Cli, BoundVerdicts) {
  const fs::path tank = fresh_dir("bound_tank"), scalar = fresh_dir("bound_scalar");
  ASSERT_EQ(run("bound --preset three-tank-groupA1 --out " + tank.string()), 0);
  EXPECT_EQ(slurp(tank / "bound_verdict.txt").rfind("converged after", 0), 0u);
  EXPECT_EQ(slurp(tank / "bound.csv").substr(0, 8), "k,trace\n");
  ASSERT_EQ(run("bound --scenario " + (kScenarios / "scalar_threshold.json").string() +
                " --out " + scalar.string()),
            0);
  EXPECT_EQ(slurp(scalar / "bound_verdict.txt").rfind("diverged after", 0), 0u);
}

TEST(Cli, BoundToleranceIsRespected) {
  const fs::path loose = fresh_dir("tol_loose"), tight = fresh_dir("tol_tight");
  ASSERT_EQ(run("bound --scenario " + (kScenarios / "two_state_bound.json").string() +
                " --tol 1e-3 --out " + loose.string()),
            0);
  ASSERT_EQ(run("bound --scenario " + (kScenarios / "two_state_bound.json").string() +
                " --tol 1e-10 --out " + tight.string()),
            0);
  auto lines = [](const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string l;
    int n = 0;
    while (std::getline(in, l)) ++n;
    return n;
  };
  EXPECT_LT(lines(loose / "bound.csv"), lines(tight / "bound.csv"));
}

TEST(Cli, ConditionsReport) {
  const fs::path tank = fresh_dir("cond_tank"), weak = fresh_dir("cond_weak");
  ASSERT_EQ(run("conditions --preset three-tank-groupA1 --out " + tank.string()), 0);
  const auto j = nlohmann::json::parse(slurp(tank / "conditions.json"));
  EXPECT_NEAR(j.at("capacity").get<double>(), 3.5977, 1e-3);
  EXPECT_EQ(j.at("entropy").get<double>(), 0.0);
  EXPECT_TRUE(j.at("capacity_condition").get<bool>());
  ASSERT_EQ(run("conditions --scenario " + (kScenarios / "unstable_weak_channel.json").string() +
                " --out " + weak.string()),
            0);
  EXPECT_FALSE(nlohmann::json::parse(slurp(weak / "conditions.json"))
                   .at("capacity_condition")
                   .get<bool>());
}

TEST(Cli, QuantizerTest) {
  const fs::path out = fresh_dir("quant");
  EXPECT_EQ(run("quantizer-test --samples 100000 --seed 3 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "quantizer.csv"));
  EXPECT_EQ(run("quantizer-test --delta -1"), 2);
}

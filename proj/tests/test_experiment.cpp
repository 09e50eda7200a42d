#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edgecache/experiment.hpp"

using namespace edgecache;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("edgecache_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A preset shrunk so a whole run takes well under a second.
ExperimentConfig tiny(std::string name) {
  ExperimentConfig c = preset(name);
  c.size_classes = {{1, 10}, {3, 10}, {5, 10}, {7, 10}, {9, 10}};
  c.cache_size = 60;
  c.horizon = 300;
  c.burn_in = 200;
  c.checkpoints = {100, 300};
  c.replications = 6;
  return c;
}

}  // namespace

TEST(Preset, Fig2) {
  const auto c = preset("fig2_cucb_small");
  EXPECT_EQ(c.cache_size, 125);
  EXPECT_EQ(c.num_files(), 100);
  ASSERT_EQ(c.policies.size(), 4u);
  EXPECT_EQ(c.policies[0].kind.type, PolicyType::kCucb);
  EXPECT_EQ(c.policies[1].kind.type, PolicyType::kMcucb);
  EXPECT_EQ(c.policies[2].kind.type, PolicyType::kEpsGreedy);
  EXPECT_EQ(c.policies[3].kind.type, PolicyType::kIub);
}

TEST(Preset, Fig3GammaGrid) {
  const auto c = preset("fig3_gamma");
  EXPECT_EQ(c.sweep_axis, SweepAxis::kGamma);
  EXPECT_EQ(c.cache_size, 256);
  EXPECT_EQ(c.num_files(), 1000);
  ASSERT_EQ(c.sweep_values.size(), 13u);
  EXPECT_EQ(c.sweep_values.front(), 0.0);
  EXPECT_EQ(c.sweep_values.back(), 2.4);
  EXPECT_EQ(c.sweep_values[3], 0.6);
}

TEST(Preset, Fig6RebindsCacheSize) {
  const auto c = preset("fig6_files");
  for (const auto& p : sweep_points(c)) {
    std::int64_t total = 0;
    int files = 0;
    for (const auto& s : p.size_classes) {
      total += static_cast<std::int64_t>(s.size) * s.count;
      files += s.count;
    }
    EXPECT_EQ(files, p.num_files);
    EXPECT_EQ(p.cache_size, std::llround(0.05 * static_cast<double>(total)));
  }
}

TEST(Preset, Fig4Percentages) {
  const auto points = sweep_points(preset("fig4_cache"));
  ASSERT_EQ(points.size(), 5u);
  EXPECT_EQ(points[0].cache_size, 50);
  EXPECT_EQ(points[2].cache_size, 250);
  EXPECT_EQ(points[4].cache_size, 1000);
}

TEST(Preset, AllNamesValidate) {
  for (auto name : kPresetNames) EXPECT_NO_THROW(validate(preset(name))) << name;
  EXPECT_THROW(preset("fig7"), std::invalid_argument);
}

TEST(ConfigText, RoundTripsEveryPreset) {
  for (auto name : kPresetNames) {
    auto c = preset(name);
    c.scale = 0.01;
    c.seed = 12345678901234ULL;
    c.gamma = 0.1 + 0.2;  // not representable in short decimal
    if (!c.policies.empty()) {
      c.policies[0].kind.gamma_hat = 1.0 / 3.0;
      c.policies[0].kind.fit_gamma = true;
      c.policies[0].kind.timeout = Seconds(2.5);
    }
    const auto text = to_config_text(c);
    const auto back = parse_config_text(text);
    EXPECT_TRUE(back == c) << name;
    EXPECT_EQ(to_config_text(back), text);
    EXPECT_EQ(fingerprint(back), fingerprint(c));
  }
}

TEST(ConfigText, HandWrittenFile) {
  const auto c = parse_config_text(R"(
; a small study
[experiment]
name = mine
gamma = 0.9
cache_size = 40
size_classes = 2:10, 4:10
horizon = 500
burn_in = 100

[policy.fast]
type = mcucb
fit_gamma = true

[policy.iub]
solver = bnb
)");
  EXPECT_EQ(c.name, "mine");
  EXPECT_EQ(c.num_files(), 20);
  EXPECT_EQ(c.users, 100);
  ASSERT_EQ(c.policies.size(), 2u);
  EXPECT_EQ(c.policies[0].name, "fast");
  EXPECT_TRUE(c.policies[0].kind.fit_gamma);
  EXPECT_EQ(c.policies[1].kind.type, PolicyType::kIub);
  EXPECT_EQ(c.policies[1].kind.solver, SolverKind::kBranchAndBound);
  EXPECT_NO_THROW(validate(c));
}

TEST(ConfigText, Errors) {
  EXPECT_THROW(parse_config_text("[experiment]\ngama = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("[experiment]\ngamma = x\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("[nope]\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("[policy.x]\ntype = mcucb\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("[experiment]\n[policy.lru]\n"), std::invalid_argument);
}

TEST(Validate, Rejections) {
  auto c = preset("fig1_convergence");
  c.policies.clear();
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig1_convergence");
  c.cache_size = 8;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig1_convergence");
  c.burn_in = c.horizon;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig4_cache");
  c.sweep_values = {0.1};  // 5 units, below the 9-unit file
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig3_gamma");
  c.sweep_values.clear();
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig1_convergence");
  c.policies.push_back(c.policies[0]);
  EXPECT_THROW(validate(c), std::invalid_argument);
  c = preset("fig1_convergence");
  c.parallelism = -1;
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.parallelism = 0;  // auto
  EXPECT_NO_THROW(validate(c));
}

TEST(Run, EmptyPolicyListWritesNothing) {
  auto c = preset("fig1_convergence");
  c.policies.clear();
  c.output_dir = scratch("empty").string();
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  EXPECT_FALSE(fs::exists(c.output_dir));
}

TEST(Run, WritesAllArtifacts) {
  auto c = tiny("fig1_convergence");
  c.output_dir = scratch("fig1").string();
  const auto rows = run_experiment(c);
  const fs::path dir(c.output_dir);
  EXPECT_TRUE(fs::exists(dir / "results.csv"));
  EXPECT_TRUE(fs::exists(dir / "config.echo"));
  EXPECT_TRUE(fs::exists(dir / "plot_fig1_convergence.svg"));
  for (const auto& p : c.policies) EXPECT_TRUE(fs::exists(dir / ("trace_" + p.name + ".csv")));

  // 4 policies x (hit rate + 2 checkpoints x 2 metrics)
  EXPECT_EQ(rows.size(), 4u * 5u);
  std::ifstream in(dir / "results.csv");
  const auto back = read_results_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].policy, rows[i].policy);
    EXPECT_EQ(back[i].metric, rows[i].metric);
    EXPECT_EQ(back[i].mean, rows[i].mean);
    EXPECT_EQ(back[i].stderr_, rows[i].stderr_);
    EXPECT_EQ(back[i].sweep_value, "-");
    EXPECT_EQ(back[i].replications, 6);
  }
  EXPECT_TRUE(load_config(dir / "config.echo") == c);

  const std::string trace = slurp(dir / "trace_mcucb.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "period,expected_reward,realized_reward,demanded,acc_reward,regret");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 301);
  const std::string svg = slurp(dir / "plot_fig1_convergence.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Run, GoldenHeaderAndRow) {
  std::ostringstream out;
  write_results_csv(out, {{"0.2", "mcucb", "hit_rate_pct", 3000, 12.5, 0.25, 100, 7}});
  EXPECT_EQ(out.str(),
            "sweep_value,policy,metric,checkpoint,mean,stderr,replications,seed\n"
            "0.2,mcucb,hit_rate_pct,3000,12.5,0.25,100,7\n");
  std::istringstream bad("sweep_value,policy\n");
  EXPECT_THROW(read_results_csv(bad), std::invalid_argument);
}

TEST(Run, SweepIsByteIdenticalAcrossParallelism) {
  auto c = tiny("fig3_gamma");
  c.sweep_values = {0.0, 0.8, 1.6};
  c.output_dir = scratch("sweep_a").string();
  c.parallelism = 1;
  run_experiment(c);
  const std::string a = slurp(fs::path(c.output_dir) / "results.csv");
  c.output_dir = scratch("sweep_b").string();
  c.parallelism = 3;
  run_experiment(c);
  const std::string b = slurp(fs::path(c.output_dir) / "results.csv");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\n0.8,mcucb,hit_rate_pct,300,"), std::string::npos);
}

TEST(Run, SpoValidationMode) {
  auto c = preset("spo_validation");
  c.spo_instances = 20;
  c.output_dir = scratch("spo").string();
  const auto rows = run_experiment(c);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0].metric, "value_ratio");
  EXPECT_GT(rows[0].mean, 0.5);
  EXPECT_LE(rows[0].mean, 1.0);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "timing.csv"));
}

TEST(Solve, ReadsCsvAndPrints) {
  std::istringstream in("value,weight\n3,1\n6,3\n5,5\n");
  const auto inst = read_instance_csv(in, 5);
  const auto s = solve_with(inst, "bnb", Seconds(10));
  std::ostringstream out;
  print_solution(out, s);
  EXPECT_NE(out.str().find("indices: 0 1\n"), std::string::npos);
  EXPECT_NE(out.str().find("value: 9\n"), std::string::npos);
  EXPECT_NE(out.str().find("status: optimal\n"), std::string::npos);
}

TEST(Solve, CapacityZeroIsEmpty) {
  std::istringstream in("3,1\n6,3\n");
  const auto s = solve_with(read_instance_csv(in, 0), "bnb", Seconds(10));
  EXPECT_TRUE(s.selected().empty());
}

TEST(Solve, GreedyOptimalOnEqualSizes) {
  std::istringstream in("9,4\n2,4\n7,4\n5,4\n1,4\n");
  const auto inst = read_instance_csv(in, 12);
  EXPECT_EQ(solve_with(inst, "greedy", Seconds(1)).value, solve_with(inst, "bnb", Seconds(1)).value);
  EXPECT_EQ(solve_with(inst, "greedy", Seconds(1)).value, solve_with(inst, "bruteforce", Seconds(1)).value);
}

TEST(Solve, RejectsMalformedInput) {
  std::istringstream neg("3,-1\n");
  EXPECT_THROW(read_instance_csv(neg, 5), std::invalid_argument);
  std::istringstream junk("3,1\nabc,2\n");
  EXPECT_THROW(read_instance_csv(junk, 5), std::invalid_argument);
  std::istringstream one_field("3,1\n4\n");
  EXPECT_THROW(read_instance_csv(one_field, 5), std::invalid_argument);
  std::istringstream ok("1,1\n");
  EXPECT_THROW(solve_with(read_instance_csv(ok, 1), "dp", Seconds(1)), std::invalid_argument);
}

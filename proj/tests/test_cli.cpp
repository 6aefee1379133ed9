#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "powerlawst_cli.hpp"

using powerlawst::cli::dispatch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = dispatch(std::move(args), out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("powerlawst_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, Pulses) {
  const auto r = run({"pulses", "--n", "5"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["total"], 16);
  EXPECT_EQ(j["per_color"], json({0, 2, 4, 8, 16}));
  EXPECT_EQ(j["sum_over_colors"], 30);
}

TEST(Cli, EldredgeTwoSites) {
  const auto r = run({"eldredge", "--r", "2", "--d", "1", "--alpha", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["total_time"].get<double>(), std::numbers::pi / 2, 1e-11);
  EXPECT_EQ(j["sites"], 2);
  EXPECT_EQ(j["asymptotics"]["kind"], "power");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"nonsense"}).status, 2);
  EXPECT_EQ(run({"pulses", "--bogus", "1"}).status, 2);
  EXPECT_EQ(run({"pulses", "--n", "abc"}).status, 2);
  EXPECT_EQ(run({"crosstalk", "--convention", "other"}).status, 2);
  EXPECT_EQ(run({"pulses", "--n", "0"}).status, 1);
  EXPECT_EQ(run({"eldredge", "--alpha", "-1"}).status, 1);
  EXPECT_EQ(run({"verify", "tran", "--m", "1"}).status, 1);
  EXPECT_EQ(run({"pulses", "--config", "/nonexistent/cfg.json"}).status, 2);
  const auto h = run({"--help"});
  EXPECT_EQ(h.status, 0);
  EXPECT_NE(h.out.find("pulses"), std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"crosstalk", "--r", "1000", "--n", "6"},
        std::vector<std::string>{"colors", "--r", "10000", "--alpha", "5"},
        std::vector<std::string>{"eldredge", "--r", "5", "--emit-events", "csv"},
        std::vector<std::string>{"echo", "--n", "4", "--emit", "csv", "--T", "3"}}) {
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, JsonRoundTrip) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"crosstalk", "--r", "500"}, std::vector<std::string>{"echo", "--n", "3"},
        std::vector<std::string>{"verify", "eldredge", "--r", "3", "--d", "1"},
        std::vector<std::string>{"echo-verify", "--extents", "8", "8", "--L", "2", "--n", "4"}}) {
    const auto r = run(args);
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.dump(2) + "\n", r.out);
    EXPECT_EQ(json::parse(j.dump()), j);
  }
}

std::set<std::string> keys(const json& j) {
  std::set<std::string> out;
  for (const auto& [k, v] : j.items()) out.insert(k);
  return out;
}

TEST(Cli, DocumentedSchemas) {
  using Keys = std::set<std::string>;
  const std::vector<std::pair<std::vector<std::string>, Keys>> cases = {
      {{"eldredge", "--r", "3"},
       {"alpha", "asymptotics", "d", "extents", "prefactor", "sites", "source", "state_transfer_time", "total_time"}},
      {{"crosstalk", "--r", "64"},
       {"alpha", "analytic_bound", "convention", "d", "i_max", "n", "norm", "per_level", "r", "r0", "schedule",
        "total"}},
      {{"colors", "--r", "100"},
       {"alpha", "analytic", "convention", "d", "eps", "n", "norm", "r", "r0", "saturated", "total_at_n"}},
      {{"pulses", "--n", "3"}, {"n", "per_color", "sum_over_colors", "total"}},
      {{"echo", "--n", "3"}, {"T", "durations", "n", "pulses_of_color", "signs", "total_pulse_instants"}},
      {{"echo-verify", "--extents", "6", "6", "--n", "4"},
       {"L", "T", "blocks", "cross_color_pairs", "d", "extents", "max_cross_color_relative",
        "max_cross_color_residual", "min_same_color_distance", "n", "same_color_pairs", "same_color_total"}},
      {{"verify", "eldredge", "--r", "2"}, {"fidelity", "protocol", "qubits", "rest_zero_weight", "total_time"}},
      {{"verify", "tran", "--d", "1"}, {"fidelity", "protocol", "qubits", "rest_zero_weight", "t1", "t2", "total_time"}},
  };
  for (const auto& [args, want] : cases) {
    const auto r = run(args);
    ASSERT_EQ(r.status, 0) << args[0] << ": " << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(keys(j), want) << args[0];
  }
  const auto x = json::parse(run({"crosstalk", "--r", "64"}).out);
  for (const auto& level : x["per_level"]) EXPECT_EQ(keys(level), (Keys{"L", "eps"}));
  const auto c = json::parse(run({"colors", "--r", "100"}).out);
  EXPECT_TRUE(keys(c["analytic"]).count("kind"));
  EXPECT_TRUE(keys(c["analytic"]).count("describe"));
}

TEST(Cli, ConfigAndOverride) {
  const auto dir = scratch("config");
  write(dir / "cfg.json", R"({"n": 3})");
  auto r = run({"pulses", "--config", (dir / "cfg.json").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["total"], 4);
  r = run({"pulses", "--config", (dir / "cfg.json").string(), "--n", "5"});
  EXPECT_EQ(json::parse(r.out)["total"], 16);

  write(dir / "bad.json", R"({"n": 3, "colour": 2})");
  r = run({"pulses", "--config", (dir / "bad.json").string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("colour"), std::string::npos);

  write(dir / "type.json", R"({"n": "three"})");
  EXPECT_EQ(run({"pulses", "--config", (dir / "type.json").string()}).status, 2);
}

TEST(Cli, OutFile) {
  const auto dir = scratch("out");
  const auto path = dir / "p.json";
  const auto r = run({"pulses", "--n", "4", "--out", path.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(path))["total"], 8);
}

TEST(Cli, VerifyTran) {
  const auto r = run({"verify", "tran", "--d", "1", "--r1", "2", "--m", "2", "--a", "0.6", "--b", "0.8"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["fidelity"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(j["qubits"], 4);
}

TEST(Cli, HybridCacheAndCsv) {
  const auto dir = scratch("cache");
  ::setenv("POWERLAWST_CACHE", dir.c_str(), 1);
  const std::vector<std::string> args{"hybrid", "--rmax", "80", "--fit-lo", "10", "--fit-hi", "20", "--emit", "csv"};
  const auto first = run(args);
  ASSERT_EQ(first.status, 0) << first.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    const auto j = json::parse(slurp(e.path()));
    EXPECT_EQ(j["d"], 2);
    EXPECT_EQ(j["times"].size(), 19u);
  }
  EXPECT_EQ(files, 1u);
  const auto second = run(args);
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(first.out.substr(0, first.out.find('\n')), "r,best_time,eldredge_time,best_split,depth");
  EXPECT_EQ(std::count(first.out.begin(), first.out.end(), '\n'), 80);

  const auto rep = run({"reproduce", "--rmax", "400", "--fit-lo", "10", "--fit-hi", "20"});
  ASSERT_EQ(rep.status, 0) << rep.err;
  const auto j = json::parse(rep.out);
  for (const char* key : {"crossover", "depth2_onset", "m_min", "m_max", "fit"}) EXPECT_TRUE(j.contains(key)) << key;
  ::unsetenv("POWERLAWST_CACHE");
}

TEST(Cli, GoldenFiles) {
  const fs::path golden = POWERLAWST_GOLDEN_DIR;
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"pulses_n5.json", {"pulses", "--n", "5"}},
      {"echo_n3.csv", {"echo", "--n", "3", "--emit", "csv"}},
      {"eldredge_chain3_events.csv", {"eldredge", "--d", "1", "--r", "3", "--emit-events", "csv"}},
  };
  for (const auto& [file, args] : cases) {
    const auto r = run(args);
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden / file)) << file;
  }
}

#include "cli_run.hpp"

#include <json.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace lvflux::testing {
namespace {

using nlohmann::json;

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> v;
  std::istringstream is(line);
  for (std::string tok; std::getline(is, tok, ',');) v.push_back(std::stod(tok));
  return v;
}

// Value of "key=<v>" on stdout.
std::string field(const std::string& out, const std::string& key) {
  for (const auto& l : lines(out))
    if (l.rfind(key + "=", 0) == 0) return l.substr(key.size() + 1);
  return {};
}

TEST(Cli, SteadyStateOrigin) {
  const auto r = run_cli({"steady-state", "--bx", "0", "--by", "0"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["regime"], "zero-stability");
  EXPECT_EQ(j["x_st"].get<double>(), 1.0);
  EXPECT_EQ(j["y_st"].get<double>(), 1.0);
  EXPECT_TRUE(j["exists"].get<bool>());
}

TEST(Cli, SteadyStateKeyOrder) {
  const auto r = run_cli({"steady-state", "--bx", "1.1", "--by", "-1.09"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"bx", "by", "exists", "discriminant", "x_st", "y_st",
                                            "lambda1", "lambda2", "regime"}));
  EXPECT_NEAR(j["x_st"].get<double>(), 1.65, 0.01);
  EXPECT_EQ(j["regime"], "stable");
  EXPECT_LT(j["lambda1"]["re"].get<double>(), 0.0);
}

TEST(Cli, SteadyStateWithoutPointIsNotAnError) {
  const auto r = run_cli({"steady-state", "--bx", "-1", "--by", "2"});
  ASSERT_EQ(r.exit_code, 0);
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["exists"].get<bool>());
  EXPECT_EQ(j["regime"], "no-stationary");
  EXPECT_LT(j["discriminant"].get<double>(), 0.0);
}

TEST(Cli, RegimeDiagramSingleCell) {
  const auto r = run_cli({"regime-diagram", "--bx-min", "0", "--bx-max", "0", "--by-min", "0",
                          "--by-max", "0"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "bx,by,regime_code\n0,0,3\n");
}

TEST(Cli, RegimeDiagramDefaultImage) {
  TempDir d;
  const auto ppm = d.file("r.ppm");
  ASSERT_EQ(run_cli({"regime-diagram", "--ppm", ppm}).exit_code, 0);
  const std::string img = slurp(ppm);
  const std::string head = "P6\n401 401\n255\n";
  ASSERT_EQ(img.substr(0, head.size()), head);
  ASSERT_EQ(img.size(), head.size() + 401u * 401u * 3u);
  // Column j is bx = -2 + 0.01 j; image row r holds by = 2 - 0.01 r.
  const auto pixel = [&](double bx, double by) {
    const auto j = static_cast<std::size_t>(std::lround((bx + 2) / 0.01));
    const auto r = static_cast<std::size_t>(std::lround((2 - by) / 0.01));
    const std::size_t off = head.size() + 3 * (r * 401 + j);
    return std::array<unsigned char, 3>{static_cast<unsigned char>(img[off]),
                                        static_cast<unsigned char>(img[off + 1]),
                                        static_cast<unsigned char>(img[off + 2])};
  };
  EXPECT_EQ(pixel(0.1, 0), (std::array<unsigned char, 3>{0, 200, 0}));
  EXPECT_EQ(pixel(-0.1, 0), (std::array<unsigned char, 3>{255, 255, 0}));
  EXPECT_EQ(pixel(0, 0), (std::array<unsigned char, 3>{150, 75, 0}));
  EXPECT_EQ(pixel(-1, 2), (std::array<unsigned char, 3>{255, 0, 0}));
  EXPECT_TRUE(std::filesystem::exists(ppm + ".manifest.json"));
}

TEST(Cli, RegimeDiagramInvertedRange) {
  EXPECT_EQ(run_cli({"regime-diagram", "--bx-min", "1", "--bx-max", "0"}).exit_code, 2);
  EXPECT_EQ(run_cli({"regime-diagram", "--step", "0"}).exit_code, 2);
}

TEST(Cli, MalformedFlags) {
  EXPECT_EQ(run_cli({"steady-state", "--bx", "abc", "--by", "0"}).exit_code, 2);
  EXPECT_EQ(run_cli({"steady-state", "--bx", "0"}).exit_code, 2);
  EXPECT_EQ(run_cli({"no-such-command"}).exit_code, 2);
  EXPECT_EQ(run_cli({"simulate", "--t-end", "1", "--noise-target", "k9", "--amplitude", "1"}).exit_code, 2);
  EXPECT_EQ(run_cli({"simulate", "--t-end", "1", "--dt", "-1"}).exit_code, 2);
}

TEST(Cli, SimulateFixedPoint) {
  const auto r = run_cli({"simulate", "--x0", "1", "--y0", "1", "--bx", "0", "--by", "0", "--dt",
                          "0.1", "--t-end", "2"});
  ASSERT_EQ(r.exit_code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 22u);
  EXPECT_EQ(ls[0], "t,x,y");
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto v = split_doubles(ls[k]);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_NEAR(v[0], 0.1 * static_cast<double>(k - 1), 1e-12);
    EXPECT_EQ(v[1], 1.0);
    EXPECT_EQ(v[2], 1.0);
  }
}

TEST(Cli, SimulateIsDeterministic) {
  TempDir d;
  const std::vector<std::string> base{"simulate", "--noise-target", "k1", "--amplitude", "0.07",
                                      "--dt", "0.05", "--t-end", "20", "--seed", "42"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", d.file("a.csv")});
  b.insert(b.end(), {"--out", d.file("b.csv")});
  ASSERT_EQ(run_cli(a).exit_code, 0);
  ASSERT_EQ(run_cli(b).exit_code, 0);
  EXPECT_EQ(slurp(d.file("a.csv")), slurp(d.file("b.csv")));
  EXPECT_EQ(lines(slurp(d.file("a.csv"))).size(), 402u);

  auto c = base;
  c.back() = "43";
  EXPECT_NE(run_cli(c).out, slurp(d.file("a.csv")));
}

TEST(Cli, SeedFromEnvironment) {
  const std::vector<std::string> args{"simulate", "--noise-target", "k1", "--amplitude", "0.07",
                                      "--dt", "0.05", "--t-end", "2"};
  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--seed", "9"});
  EXPECT_EQ(run_cli(args, "LVFLUX_SEED=9").out, run_cli(with_flag).out);
  auto other = args;
  other.insert(other.end(), {"--seed", "10"});
  EXPECT_EQ(run_cli(other, "LVFLUX_SEED=9").out, run_cli(other).out);
}

TEST(Cli, SimulateNonPhysicalExit) {
  const auto r = run_cli({"simulate", "--x0", "0.05", "--y0", "3", "--bx", "-0.5", "--by", "0",
                          "--dt", "0.1", "--t-end", "5"});
  EXPECT_EQ(r.exit_code, 3);
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 3u);
  EXPECT_EQ(ls[0], "t,x,y");
  EXPECT_EQ(ls.back().rfind("# nonphysical at t=", 0), 0u);
}

TEST(Cli, SimulateLinearizedStartsAtZero) {
  const auto r = run_cli({"simulate", "--linearized", "--noise-target", "k1", "--amplitude",
                          "0.07", "--dt", "0.01", "--t-end", "1"});
  ASSERT_EQ(r.exit_code, 0);
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[1], "0,0,0");
}

TEST(Cli, NoStationaryPointExit) {
  EXPECT_EQ(run_cli({"moments", "--bx", "-1", "--by", "2", "--amplitude", "0.02", "--t-end", "1"}).exit_code, 4);
  EXPECT_EQ(run_cli({"simulate", "--bx", "-1", "--by", "2", "--t-end", "1"}).exit_code, 4);
}

TEST(Cli, EnsembleZeroAmplitude) {
  const auto r = run_cli({"ensemble", "--m", "10", "--noise-target", "k1", "--amplitude", "0",
                          "--dt", "0.05", "--t-end", "5"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(field(r.out, "alpha"), "undefined");
  EXPECT_EQ(field(r.out, "failed"), "0");
  const auto ls = lines(r.out);
  ASSERT_EQ(ls[0], "t,msd,valid_count");
  std::size_t rows = 0;
  for (const auto& l : ls) {
    if (l.find(',') == std::string::npos || l == ls[0]) continue;
    const auto v = split_doubles(l);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_EQ(v[2], 10.0);
    ++rows;
  }
  EXPECT_EQ(rows, 101u);
}

TEST(Cli, EnsembleLinearizedAlpha) {
  const auto r = run_cli({"ensemble", "--m", "400", "--linearized", "--noise-target", "k1",
                          "--amplitude", "0.07", "--dt", "0.01", "--t-end", "50", "--threads", "2"});
  ASSERT_EQ(r.exit_code, 0);
  const double alpha = std::stod(field(r.out, "alpha"));
  EXPECT_GE(alpha, 0.85);
  EXPECT_LE(alpha, 1.15);
}

TEST(Cli, MomentsClosedForm) {
  const auto r = run_cli({"moments", "--bx", "0", "--by", "0", "--amplitude", "0.07", "--dt",
                          "0.01", "--t-end", "20", "--closed-form"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_LT(std::stod(field(r.out, "max_deviation")), 1e-8);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls[0].rfind("t,var_x,var_y,cov_xy", 0), 0u);
  for (std::size_t k = 2; k < ls.size(); ++k) {
    if (ls[k].find(',') == std::string::npos) continue;
    const auto v = split_doubles(ls[k]);
    EXPECT_NEAR(v[1] + v[2], 0.0049 * v[0], 1e-6 * 0.0049 * v[0]);
  }
  EXPECT_EQ(run_cli({"moments", "--bx", "0.1", "--by", "0", "--amplitude", "0.07", "--t-end",
                     "1", "--closed-form"}).exit_code, 2);
}

TEST(Cli, MomentsZeroAmplitude) {
  const auto r = run_cli({"moments", "--bx", "1.1", "--by", "-1.09", "--amplitude", "0",
                          "--t-end", "5"});
  ASSERT_EQ(r.exit_code, 0);
  const auto ls = lines(r.out);
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto v = split_doubles(ls[k]);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_EQ(v[2], 0.0);
    EXPECT_EQ(v[3], 0.0);
  }
}

TEST(Cli, BasinNotStable) {
  EXPECT_EQ(run_cli({"basin", "--bx", "0", "--by", "0"}).exit_code, 5);
  EXPECT_EQ(run_cli({"basin", "--bx", "-0.1", "--by", "0"}).exit_code, 5);
}

TEST(Cli, BasinStrongFocus) {
  TempDir d;
  const auto csv = d.file("b.csv");
  const auto r = run_cli({"basin", "--bx", "-0.1", "--by", "0.3", "--x-max", "2", "--y-max", "2",
                          "--step", "0.1", "--csv", csv});
  ASSERT_EQ(r.exit_code, 0);
  const double frac = std::stod(field(r.out, "converged_fraction"));
  EXPECT_GT(frac, 0.0);
  EXPECT_LT(frac, 1.0);
  const auto ls = lines(slurp(csv));
  EXPECT_EQ(ls[0], "x,y,outcome");
  EXPECT_EQ(ls.size(), 1u + 21u * 21u);
  // (0.6, 0.8) is the node nearest (0.64, 0.84).
  EXPECT_NE(std::find(ls.begin(), ls.end(), "0.6000000000000001,0.8,converged"), ls.end());
}

// Same artifact bytes for every --threads value, and a replay from the manifest command.
void check_threads_and_replay(const std::vector<std::string>& args, const std::string& flag,
                              const std::string& name) {
  TempDir d;
  std::string first;
  for (const char* t : {"1", "2", "5"}) {
    auto a = args;
    const auto path = d.file(name + "-" + t);
    a.insert(a.end(), {flag, path, "--threads", t});
    ASSERT_EQ(run_cli(a).exit_code, 0) << name;
    const auto bytes = slurp(path);
    ASSERT_FALSE(bytes.empty());
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first) << name << " threads=" << t;
  }
  const auto path = d.file(name + "-1");
  const auto manifest = json::parse(slurp(path + ".manifest.json"));
  EXPECT_EQ(manifest["tool"], "lvflux");
  EXPECT_FALSE(manifest["parameters"].contains("threads"));
  auto cmd = manifest["command"].get<std::vector<std::string>>();
  ASSERT_GE(cmd.size(), 2u);
  std::filesystem::rename(path, path + ".orig");
  cmd.erase(cmd.begin());
  ASSERT_EQ(run_cli(cmd).exit_code, 0);
  EXPECT_EQ(slurp(path), slurp(path + ".orig")) << name << " replay";
}

TEST(Cli, EnsembleThreadsAndReplay) {
  check_threads_and_replay({"ensemble", "--m", "20", "--noise-target", "k3", "--amplitude", "0.07",
                            "--dist", "gaussian", "--dt", "0.05", "--t-end", "5", "--seed", "5"},
                           "--out", "ens.csv");
}

TEST(Cli, RegimeDiagramThreadsAndReplay) {
  check_threads_and_replay({"regime-diagram", "--step", "0.05"}, "--ppm", "rd.ppm");
}

TEST(Cli, BasinThreadsAndReplay) {
  check_threads_and_replay({"basin", "--bx", "-0.1", "--by", "0.3", "--x-max", "2", "--y-max", "2",
                            "--step", "0.2"},
                           "--csv", "basin.csv");
}

}  // namespace
}  // namespace lvflux::testing

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace wsbm;
namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() : dir(fs::temp_directory_path() / ("wsbm_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(WSBM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SimulateEstimateRoundTrip) {
  Workdir w;
  ASSERT_EQ(run("simulate --design design1 --n 80 --seed 4 -o " + (w / "net.csv") + " --labels " +
                (w / "z.csv")),
            0);
  EXPECT_EQ(read_network(w / "net.csv").size(), 80u);
  EXPECT_EQ(slurp(w / "z.csv").rfind("node,community\n", 0), 0u);
  ASSERT_EQ(run("estimate -i " + (w / "net.csv") + " --r 2 --basis indicator --thresholds 0,1 --moments 1 -o " +
                (w / "a.json")),
            0);
  auto a = json::parse(slurp(w / "a.json"));
  ASSERT_EQ(run("estimate -i " + (w / "net.csv") + " --r 2 --basis indicator --thresholds 0,1 --moments 1 -o " +
                (w / "a.json")),
            0);
  auto b = json::parse(slurp(w / "a.json"));
  EXPECT_EQ(a["p_hat"]["normalized"].size(), 2u);
  a.erase("timestamp");
  b.erase("timestamp");
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, ConfigFileWithOverride) {
  Workdir w;
  {
    std::ofstream f(w / "run.cfg");
    f << "format_version: 1\ndesign: design2\nn: 60\nreps: 4\nseed: 9\n";
  }
  EXPECT_EQ(run("montecarlo -c " + (w / "run.cfg") + " --n 50 -o " + (w / "mc.json") + " --table " +
                (w / "mc.csv")),
            0);
  const auto doc = json::parse(slurp(w / "mc.json"));
  EXPECT_EQ(doc["n"], 50);
  EXPECT_EQ(doc["reps"], 4);
  EXPECT_EQ(slurp(w / "mc.csv").rfind("statistic,", 0), 0u);
}

TEST(Cli, ExitCodes) {
  Workdir w;
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("montecarlo --reps 0"), 1);
  EXPECT_EQ(run("estimate --no-such-flag"), 1);
  EXPECT_EQ(run("estimate -i " + (w / "missing.csv")), 2);
  {
    std::ofstream f(w / "bad.csv");
    f << "i,j,weight\n0,1,1\n0,2,0\n0,3,2\n1,2,1\n1,3,0\n";
  }
  EXPECT_EQ(run("estimate -i " + (w / "bad.csv")), 2);
  {
    // All weights equal: the two-star matrix has rank one, so r = 2 fails.
    std::ofstream f(w / "flat.csv");
    write_network(wsbm::testing::constant_network(8, 0.3), f);
  }
  EXPECT_EQ(run("estimate -i " + (w / "flat.csv") + " --r 2 --basis polynomial --degree 2"), 3);
  EXPECT_EQ(run("estimate -i " + (w / "flat.csv") + " --r 2"), 1);
  EXPECT_EQ(run("estimate -i " + (w / "flat.csv") + " --r 1"), 0);
}

TEST(Cli, NonConvergenceNeedsOverride) {
  Workdir w;
  const auto params = BlockModelParams::from_upper(
      {0.2, 0.3, 0.5}, {BetaLaw{2, 5}, BetaLaw{2, 2}, BetaLaw{3, 3}, BetaLaw{5, 2}, BetaLaw{1, 1}, BetaLaw{4, 4}});
  write_network(draw_network(params, 40, 1).net, w / "net.csv");
  const std::string base = "estimate -i " + (w / "net.csv") + " --r 3 --max-sweeps 1 --tol 1e-300";
  EXPECT_EQ(run(base), 3);
  EXPECT_EQ(run(base + " --allow-nonconvergence"), 0);
}

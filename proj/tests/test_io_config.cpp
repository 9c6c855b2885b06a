#include <filesystem>
#include <sstream>

#include "support.hpp"

using namespace wsbm;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_edge_list(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::config;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("wsbm_test_" + name); }

}  // namespace

TEST(ReadNetwork, CompleteEdgeList) {
  std::istringstream in("i,j,weight\n0,1,1\n0,2,0\n0,3,2.5\n1,2,1\n1,3,0\n2,3,1e-3\n");
  const auto net = parse_edge_list(in);
  EXPECT_EQ(net.size(), 4u);
  EXPECT_EQ(net.weight(3, 0), 2.5);
  EXPECT_EQ(net.weight(3, 2), 1e-3);
}

TEST(ReadNetwork, Errors) {
  EXPECT_EQ(code_of("i,j,weight\n0,1,1\n0,2,0\n0,3,2\n1,2,1\n2,2,1.0\n2,3,1\n"), ErrorCode::self_loop);
  EXPECT_EQ(code_of("i,j,weight\n0,1,1\n0,2,0\n0,3,2\n1,2,1\n1,3,0\n"), ErrorCode::missing_pair);
  EXPECT_EQ(code_of("i,j,weight\n0,1,1\n1,0,1\n"), ErrorCode::duplicate_pair);
  EXPECT_EQ(code_of("i,j,weight\n0,1,abc\n"), ErrorCode::non_numeric_weight);
  EXPECT_EQ(code_of("i,j,weight\n0,1,1\n0,2,1\n1,2,1\n"), ErrorCode::too_few_nodes);
}

TEST(ReadNetwork, DenseAndAutoDetect) {
  const auto path = temp_file("dense.csv");
  {
    std::ofstream f(path);
    f << "0,1,2,3\n1,0,4,5\n2,4,0,6\n3,5,6,0\n";
  }
  const auto net = read_network(path.string());
  EXPECT_EQ(net.weight(2, 3), 6.0);
  fs::remove(path);
  EXPECT_THROW(read_network("/nonexistent/net.csv"), Error);
}

TEST(RoundTrip, NetworkBitExact) {
  std::mt19937_64 gen(42);
  for (auto fmt : {NetworkFormat::edge_list, NetworkFormat::dense}) {
    const auto net = wsbm::testing::random_network(17, gen);
    const auto path = temp_file("rt.csv");
    write_network(net, path.string(), fmt);
    const auto back = read_network(path.string());
    EXPECT_TRUE(back == net);
    fs::remove(path);
  }
}

TEST(RoundTrip, ParamsBitExact) {
  const auto params = BlockModelParams::from_upper(
      {0.1, 0.2, 0.7}, {BetaLaw{0.3, 1.0 / 3.0}, NormalLaw{-1.25, 0.1}, Bernoulli{1.0 / 7.0},
                        Discrete{{0.0, 0.5, 2.0}, {0.2, 0.3, 0.5}}, PointMass{3.14159}, BetaLaw{5, 2}});
  const auto path = temp_file("params.json");
  write_params(params, path.string());
  EXPECT_TRUE(read_params(path.string()) == params);
  fs::remove(path);
  EXPECT_THROW(params_from_json(json{{"format_version", 1}, {"p", {1.0}}, {"edge_law", {{{"family", "cauchy"}}}}}),
               Error);
}

TEST(Config, MinimalDefaults) {
  const auto path = temp_file("min_net.csv");
  { std::ofstream(path) << "i,j,weight\n"; }
  const auto cfg = parse_config("command: estimate\ninput: " + path.string() + "\nr: 2\n");
  EXPECT_EQ(cfg.basis, "auto");
  EXPECT_EQ(cfg.tol, 1e-12);
  EXPECT_EQ(cfg.max_sweeps, 100);
  EXPECT_EQ(cfg.kernel, "epanechnikov");
  EXPECT_EQ(cfg.r, 2u);
  fs::remove(path);
}

TEST(Config, FlagsOverrideFile) {
  const auto cfg = parse_config("command: montecarlo\nr: 2\n", {{"r", "3"}});
  EXPECT_EQ(cfg.r, 3u);
}

TEST(Config, Errors) {
  const auto code = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(code("command: montecarlo\nreps: 0\n").find("reps"), std::string::npos);
  EXPECT_NE(code("command: montecarlo\ncolour: blue\n").find("line 2"), std::string::npos);
  EXPECT_NE(code("command: montecarlo\nr: two\n").find("line 2"), std::string::npos);
  EXPECT_NE(code("command: montecarlo\nformat_version: 2\n").find("format_version"), std::string::npos);
  EXPECT_NE(code("command: montecarlo\nbasis: indicator\nthresholds: [1, 0]\n").find("increasing"), std::string::npos);
  EXPECT_NE(code("command: estimate\ninput: /no/such/file\n").find("does not exist"), std::string::npos);
  EXPECT_NE(code("command: simulate\n").find("output"), std::string::npos);
  EXPECT_NE(code("nonsense line\n").find("line 1"), std::string::npos);
}

TEST(Config, ListsAndWarnings) {
  const auto cfg = parse_config(
      "# comment\ncommand: montecarlo\ncdf_grid: 0:1:5\nmoments: [1, 2]\ndensity_grid: 0.1, 0.2\n");
  EXPECT_EQ(cfg.cdf_grid, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(cfg.moments, (std::vector<int>{1, 2}));
  EXPECT_EQ(cfg.density_grid.size(), 2u);
  EXPECT_FALSE(cfg.warnings.empty());
}

TEST(Report, EstimateDocument) {
  const auto design = binary_design(1);
  const auto draw = draw_network(design.params, 60, 3);
  RunConfig cfg;
  cfg.command = "estimate";
  cfg.r = 2;
  cfg.basis = "indicator";
  cfg.thresholds = {0.0, 1.0};
  cfg.moments = {1};
  cfg.cdf_grid = {0.5};
  auto res = fit(draw.net, fit_options_from(cfg));
  const auto doc = estimate_report(res, cfg, draw.net.size());
  EXPECT_EQ(doc["p_hat"]["raw"].size(), 2u);
  double s = 0.0;
  for (const auto& v : doc["p_hat"]["normalized"]) s += v.get<double>();
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_EQ(doc["library"]["version"], kVersion);
  EXPECT_EQ(doc["functionals"].size(), 1u);
  EXPECT_TRUE(doc["diagnostics"].contains("offdiag_final"));
  EXPECT_TRUE(doc["diagnostics"].contains("condition_G"));
  EXPECT_TRUE(doc["config"].contains("format_version"));
  // JSON numbers round-trip exactly.
  EXPECT_EQ(json::parse(doc.dump())["G_hat"][0][0].get<double>(), res.block.G_hat(0, 0));
}

TEST(Report, DensityShape) {
  const auto params = BlockModelParams::from_upper({0.4, 0.6}, {BetaLaw{2, 5}, BetaLaw{2, 2}, BetaLaw{5, 2}});
  const auto draw = draw_network(params, 60, 3);
  RunConfig cfg;
  cfg.command = "estimate";
  cfg.density_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto doc = estimate_report(fit(draw.net, fit_options_from(cfg)), cfg, 60);
  std::size_t values = 0;
  for (const auto& m : doc["density"]["f_hat"])
    for (const auto& row : m) values += row.size();
  EXPECT_EQ(values, 5u * 2u * 2u);
}

TEST(Report, McTables) {
  const auto s = run_design(binary_design(1), 40, 4, 1);
  std::ostringstream csv, text;
  write_mc_csv(s, csv);
  write_mc_text(s, text);
  EXPECT_EQ(csv.str().rfind("statistic,\"phi[1,1]\"", 0), 0u);
  EXPECT_NE(text.str().find("std. dev."), std::string::npos);
  EXPECT_EQ(to_json(s)["rows"].size(), s.rows.size());
}

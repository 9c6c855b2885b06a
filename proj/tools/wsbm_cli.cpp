// wsbm: simulate weighted block-model networks, estimate block models from
// observed networks, and run Monte Carlo designs.
//
// Exit status: 0 success, 1 usage/config error, 2 data error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "wsbm/wsbm.hpp"

namespace {

struct FlagSpec {
  const char* key;
  const char* flag;
  const char* help;
  bool boolean = false;
};

// Every config key is also a command-line flag; flags win over the file.
constexpr FlagSpec kFlags[] = {
    {"input", "--input,-i", "input network (edge list or dense matrix)"},
    {"output", "--output,-o", "output path"},
    {"table", "--table", "montecarlo: flat CSV summary table"},
    {"labels", "--labels", "simulate: write latent communities here"},
    {"network_format", "--network-format", "auto | edgelist | dense"},
    {"design", "--design", "design1 | design2 | design3 | params JSON path"},
    {"r", "--r", "number of communities"},
    {"basis", "--basis", "auto | indicator | polynomial"},
    {"thresholds", "--thresholds", "indicator grid, e.g. 0,1 or lo:hi:count"},
    {"degree", "--degree", "polynomial degree"},
    {"moments", "--moments", "moment powers to estimate, e.g. 1,2"},
    {"pmf", "--pmf", "support values for conditional pmf estimates"},
    {"cdf_grid", "--cdf-grid", "points for conditional cdf estimates"},
    {"rearrange", "--rearrange", "monotone rearrangement of the cdf grid", true},
    {"density_grid", "--density-grid", "points for conditional density estimates"},
    {"bandwidth", "--bandwidth", "rate | fixed"},
    {"bandwidth_value", "--bandwidth-value", "c for rate (h = c sd n^-2/5), h for fixed"},
    {"kernel", "--kernel", "epanechnikov | gaussian"},
    {"tol", "--tol", "joint diagonalization tolerance (rotation sine)"},
    {"max_sweeps", "--max-sweeps", "joint diagonalization sweep limit"},
    {"allow_nonconvergence", "--allow-nonconvergence", "accept a result that hit max sweeps", true},
    {"seed", "--seed", "random seed (montecarlo: seed of replication 0)"},
    {"reps", "--reps", "montecarlo replications"},
    {"n", "--n", "number of nodes to simulate"},
    {"threads", "--threads", "montecarlo worker threads"},
};

int run_simulate(const wsbm::RunConfig& cfg) {
  const auto params = wsbm::params_from(cfg);
  const auto draw = wsbm::draw_network(params, cfg.n, cfg.seed);
  wsbm::write_network(draw.net, cfg.output,
                      cfg.network_format == "dense" ? wsbm::NetworkFormat::dense : wsbm::NetworkFormat::edge_list);
  if (!cfg.labels.empty()) {
    std::ofstream out(cfg.labels);
    if (!out) throw wsbm::Error(wsbm::ErrorCode::io, "cannot write '" + cfg.labels + "'");
    out << "node,community\n";
    for (std::size_t i = 0; i < draw.z.size(); ++i) out << i << ',' << draw.z[i] + 1 << '\n';
  }
  return 0;
}

int run_estimate(const wsbm::RunConfig& cfg) {
  const auto fmt = cfg.network_format == "edgelist" ? wsbm::NetworkFormat::edge_list
                   : cfg.network_format == "dense"  ? wsbm::NetworkFormat::dense
                                                    : wsbm::NetworkFormat::auto_detect;
  const auto net = wsbm::read_network(cfg.input, fmt);
  const auto res = wsbm::fit(net, wsbm::fit_options_from(cfg));
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (!res.block.converged && !cfg.allow_nonconvergence) {
    std::cerr << "error: joint diagonalization did not converge in " << cfg.max_sweeps
              << " sweeps (pass --allow-nonconvergence to accept)\n";
    return wsbm::exit_code(wsbm::ErrorCode::not_converged);
  }
  const auto doc = wsbm::estimate_report(res, cfg, net.size()).dump(2);
  if (cfg.output.empty()) {
    std::cout << doc << '\n';
  } else {
    std::ofstream out(cfg.output);
    if (!out) throw wsbm::Error(wsbm::ErrorCode::io, "cannot write '" + cfg.output + "'");
    out << doc << '\n';
  }
  return 0;
}

int run_montecarlo(const wsbm::RunConfig& cfg) {
  const auto design = wsbm::design_from(cfg);
  wsbm::McConfig mc;
  mc.tol = cfg.tol;
  mc.max_sweeps = cfg.max_sweeps;
  mc.threads = cfg.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const auto summary = wsbm::run_design(design, cfg.n, cfg.reps, cfg.seed, mc);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

  wsbm::write_mc_text(summary, std::cout);
  std::cerr << "elapsed " << dt.count() << " s (" << dt.count() / static_cast<double>(cfg.reps)
            << " s per replication)\n";
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw wsbm::Error(wsbm::ErrorCode::io, "cannot write '" + cfg.output + "'");
    out << wsbm::to_json(summary).dump(2) << '\n';
  }
  if (!cfg.table.empty()) {
    std::ofstream out(cfg.table);
    if (!out) throw wsbm::Error(wsbm::ErrorCode::io, "cannot write '" + cfg.table + "'");
    wsbm::write_mc_csv(summary, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric estimation of weighted stochastic block models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("wsbm ") + wsbm::kVersion);

  struct Sub {
    CLI::App* app;
    std::string config;
    std::vector<std::string> values;
    std::vector<bool> flags;
  };
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "draw a network from a block model"},
      {"estimate", "estimate a block model from a network file"},
      {"montecarlo", "replicate a simulation design and summarize"},
  };
  constexpr std::size_t nflags = std::size(kFlags);
  std::vector<Sub> subs(std::size(commands));
  for (std::size_t c = 0; c < subs.size(); ++c) {
    auto& s = subs[c];
    s.app = app.add_subcommand(commands[c].first, commands[c].second);
    s.app->add_option("--config,-c", s.config, "config file (key: value lines)");
    s.values.resize(nflags);
    s.flags.assign(nflags, false);
    for (std::size_t k = 0; k < nflags; ++k) {
      if (kFlags[k].boolean) {
        s.app->add_flag_callback(kFlags[k].flag, [&s, k] { s.flags[k] = true; }, kFlags[k].help);
      } else {
        s.app->add_option(kFlags[k].flag, s.values[k], kFlags[k].help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (std::size_t c = 0; c < subs.size(); ++c) {
    auto& s = subs[c];
    if (!s.app->parsed()) continue;
    std::vector<std::pair<std::string, std::string>> overrides{{"command", commands[c].first}};
    for (std::size_t k = 0; k < nflags; ++k) {
      if (kFlags[k].boolean) {
        if (s.flags[k]) overrides.emplace_back(kFlags[k].key, "true");
      } else if (s.app->count(std::string(kFlags[k].flag).substr(0, std::string(kFlags[k].flag).find(','))) > 0) {
        overrides.emplace_back(kFlags[k].key, s.values[k]);
      }
    }
    try {
      auto cfg = wsbm::load_config(s.config, overrides);
      for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
      if (cfg.command == "simulate") return run_simulate(cfg);
      if (cfg.command == "estimate") return run_estimate(cfg);
      return run_montecarlo(cfg);
    } catch (const wsbm::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return wsbm::exit_code(e.code());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

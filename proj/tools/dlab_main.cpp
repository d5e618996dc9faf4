// dlab: acoustic droplet-cloud laboratory.
//
// Simulates wave propagation through a resonant micro-droplet cloud, computes
// Neumann-to-Dirichlet pairings, and reconstructs the refraction coefficient
// from complex-geometrical-optics data. Subcommands run one experiment each
// and drop CSV/JSON artifacts plus a manifest into the output directory.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dropletlab/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dlab::invalid_config("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dropletlab numerical experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  bool no_cache = false;
  std::string mode;

  const std::vector<std::string> experiments = {"spectra",   "forward",     "converge",
                                                "linearize", "reconstruct", "selftest"};
  std::string chosen;
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
    sub->add_flag("--no-cache", no_cache, "bypass kernel/spectrum caches");
    if (name == "reconstruct")
      sub->add_option("--mode", mode, "coefficient mode: oracle | measurement");
    sub->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    dlab::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = dlab::parse_config(read_file(config_path));
    }
    cfg.experiment = chosen;
    cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (no_cache) cfg.no_cache = true;
    if (!mode.empty()) cfg.mode = mode;
    if (cfg.mode != "oracle" && cfg.mode != "measurement")
      throw dlab::invalid_config("--mode must be 'oracle' or 'measurement'");

    const dlab::RunResult res = dlab::run_experiment(cfg);
    if (res.status == 0) {
      std::cout << chosen << ": ok";
      if (!res.artifacts.empty()) {
        std::cout << " (artifacts:";
        for (const auto& a : res.artifacts) std::cout << " " << a;
        std::cout << ")";
      }
      std::cout << "\n";
    } else {
      std::cerr << chosen << ": failed with status " << res.status << "\n";
    }
    return res.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

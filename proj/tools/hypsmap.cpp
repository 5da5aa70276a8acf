// Command-line batch runner: soliton checks, gauge round trips, time
// evolution, kernel decay fits and parameter sweeps, all emitting
// manifest-stamped CSV.
#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "hypsmap/runners.hpp"

namespace fs = std::filesystem;
using namespace hypsmap;

namespace {

struct Output {
  fs::path dir;
  std::string prefix;
  fs::path file(const std::string& suffix) const {
    return dir / (prefix + "_" + suffix + ".csv");
  }
};

Output make_output(const Config& cfg) {
  Output out;
  out.dir = cfg.get_string("output.dir", "out");
  out.prefix = cfg.get_string("output.prefix", "run");
  fs::create_directories(out.dir);
  return out;
}

void run_command(const std::string& cmd, const Config& cfg) {
  const Output out = make_output(cfg);
  if (cmd == "soliton-check") {
    std::ofstream os(out.file("soliton"));
    run_soliton_check(cfg, os);
    std::cout << "wrote " << out.file("soliton").string() << "\n";
  } else if (cmd == "roundtrip") {
    std::ofstream os(out.file("roundtrip"));
    run_roundtrip(cfg, os);
    std::cout << "wrote " << out.file("roundtrip").string() << "\n";
  } else if (cmd == "evolve") {
    std::ofstream os(out.file("trajectory"));
    std::ofstream fin(out.file("final"));
    run_evolve(cfg, os, fin);
    std::cout << "wrote " << out.file("trajectory").string() << " and "
              << out.file("final").string() << "\n";
  } else if (cmd == "kernel-decay") {
    std::ofstream os(out.file("kernel_decay"));
    run_kernel_decay(cfg, os);
    std::cout << "wrote " << out.file("kernel_decay").string() << "\n";
  } else if (cmd == "sweep") {
    const std::string key = cfg.get_string("sweep.key", "");
    if (key.empty()) throw ConfigError("sweep.key is required");
    const std::string sub = cfg.get_string("sweep.command", "evolve");
    if (sub == "sweep") throw ConfigError("sweep cannot nest");
    const auto values = cfg.get_list("sweep.values", "");
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("HYPSMAP_THREADS"))
      threads = static_cast<unsigned>(std::max(1L, std::atol(env)));
    threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));

    std::mutex log_mutex;
    std::vector<std::string> errors;
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t k = next.fetch_add(1); k < values.size(); k = next.fetch_add(1)) {
        try {
          Config local = cfg;
          local.set(key + "=" + fmt(values[k]));
          local.set("output.prefix=" + cfg.get_string("output.prefix", "run") +
                    "_sweep" + std::to_string(k));
          run_command(sub, local);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lk(log_mutex);
          errors.push_back(e.what());
        }
      }
    };
    for (unsigned i = 0; i < std::max(1u, threads); ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (!errors.empty()) throw NumericalFailure("sweep worker failed: " + errors[0]);
  } else {
    throw ConfigError("unknown command: " + cmd);
  }
}

void write_diagnostic(const Config& cfg, const std::string& what) {
  try {
    const Output out = make_output(cfg);
    std::ofstream diag(out.dir / (out.prefix + ".diag.txt"));
    diag << "numerical failure\n" << what << "\n";
  } catch (...) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypsmap: equivariant Schrodinger maps from the hyperbolic plane"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  for (const char* name :
       {"soliton-check", "roundtrip", "evolve", "kernel-decay", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--set", overrides, "override as section.key=value");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  Config cfg;
  try {
    cfg.parse_file(config_path);
    for (const auto& o : overrides) cfg.set(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    run_command(cmd, cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    write_diagnostic(cfg, e.what());
    return 3;
  }
  return 0;
}

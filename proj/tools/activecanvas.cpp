#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "activecanvas/config.hpp"
#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"
#include "activecanvas/service.hpp"
#include "activecanvas/workspace.hpp"

namespace fs = std::filesystem;
using namespace activecanvas;

namespace {

workspace::Workspace open_dataset(const fs::path& dir, std::uint64_t seed) {
  if (workspace::is_saved_workspace(dir)) {
    const auto abs = fs::absolute(dir).lexically_normal();
    const auto leaf = abs.has_filename() ? abs : abs.parent_path();
    return workspace::reload_workspace(leaf.parent_path(), leaf.filename().string());
  }
  return workspace::load_workspace(dir / "manifest.json", dir / "features.csv", std::nullopt, seed);
}

EngineConfig engine_config(const std::string& path, std::optional<std::uint64_t> seed) {
  EngineConfig c = path.empty() ? EngineConfig{} : load_config(path);
  if (seed) c.seed = *seed;
  c.validate();
  return c;
}

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + out);
  f << j.dump(2) << "\n";
}

void prime(workspace::Workspace& ws, const std::vector<int>& labels, int commits, std::uint64_t seed) {
  for (int c = 0; c < commits; ++c) {
    harness::commit_sorted_layout(ws, labels, harness::Strategy::kClassAnchors, 0.03,
                                  seed * 31 + static_cast<std::uint64_t>(c), "diligent-" + std::to_string(c + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic canvas engine: synthetic data, simulated users, benchmarks and the session server"};
  app.require_subcommand(1);

  // gen
  harness::SyntheticSpec spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic labelled dataset (manifest, features, thumbnails)");
  gen->add_option("-o,--out", gen_out, "Dataset directory")->required();
  gen->add_option("--classes", spec.classes)->capture_default_str();
  gen->add_option("--items", spec.items)->capture_default_str();
  gen->add_option("--dims", spec.dims)->capture_default_str();
  gen->add_option("--informative", spec.informative)->capture_default_str();
  gen->add_option("--noise", spec.noise)->capture_default_str();
  gen->add_option("--separation", spec.separation)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();

  // simulate
  std::string sim_dataset, sim_config, sim_strategy = "class-anchors", sim_out;
  harness::SimulatedUser user;
  std::optional<std::uint64_t> sim_seed;
  int diligent = 0;
  auto* sim = app.add_subcommand("simulate", "Run a headless simulated user and print a JSON report");
  sim->add_option("-d,--data,--dataset", sim_dataset, "Dataset or saved workspace directory")->required();
  sim->add_option("--strategy", sim_strategy, "class-anchors | bullseye | axis-gradient")->capture_default_str();
  sim->add_option("--sigma", user.sigma, "Placement noise")->capture_default_str();
  sim->add_option("--schedule", user.schedule, "Cumulative touched counts")->delimiter(',')->capture_default_str();
  sim->add_option("--seed", sim_seed, "User and engine seed");
  sim->add_option("--config", sim_config, "EngineConfig JSON");
  sim->add_option("--diligent-commits", diligent, "Class-sorted commits made before the run")->capture_default_str();
  sim->add_option("-o,--report,--out", sim_out, "Write the report here instead of stdout");

  // bench
  std::string bench_dataset, bench_config, bench_out;
  std::size_t reps = 5;
  std::vector<std::size_t> bench_touched{8, 20, 50};
  std::optional<std::uint64_t> bench_seed;
  int prime_commits = 0;
  auto* ben = app.add_subcommand("bench", "Time refinements at several touched counts");
  ben->add_option("-d,--data,--dataset", bench_dataset, "Dataset or saved workspace directory")->required();
  ben->add_option("--reps,--repetitions", reps)->capture_default_str();
  ben->add_option("--touched", bench_touched)->delimiter(',')->capture_default_str();
  ben->add_option("--seed", bench_seed, "Engine seed (overrides config)");
  ben->add_option("--config", bench_config, "EngineConfig JSON");
  ben->add_option("--prime-commits", prime_commits, "Class-sorted commits made before timing (needs labels)")
      ->capture_default_str();
  ben->add_option("-o,--out", bench_out, "Write the table here instead of stdout");

  // serve
  std::string data_dir, serve_config, address = "127.0.0.1";
  unsigned short port = 8080;
  std::uint64_t serve_seed = 0;
  auto* srv = app.add_subcommand("serve", "Serve HTTP and websocket sessions for every dataset in a directory");
  srv->add_option("--data-dir", data_dir, "Directory of datasets / saved workspaces")->required();
  srv->add_option("--port", port)->capture_default_str();
  srv->add_option("--address", address)->capture_default_str();
  srv->add_option("--config", serve_config, "EngineConfig JSON");
  srv->add_option("--seed", serve_seed, "Engine and initial-layout seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto data = harness::generate_synthetic(spec);
      harness::write_dataset(data, gen_out);
      std::cout << "wrote " << data.manifest.size() << " items x " << data.features.cols()
                << " features to " << gen_out << "\n";
    } else if (*sim) {
      user.strategy = harness::parse_strategy(sim_strategy);
      if (sim_seed) user.seed = *sim_seed;
      const auto config = engine_config(sim_config, sim_seed);
      auto ws = open_dataset(sim_dataset, config.seed);
      const auto labels = harness::labels_of(ws);
      prime(ws, labels, diligent, user.seed);
      emit(harness::to_json(harness::simulate(ws, labels, user, config)), sim_out);
    } else if (*ben) {
      const auto config = engine_config(bench_config, bench_seed);
      auto ws = open_dataset(bench_dataset, config.seed);
      if (prime_commits > 0) prime(ws, harness::labels_of(ws), prime_commits, config.seed);
      emit(harness::to_json(harness::bench(ws, config, reps, bench_touched)), bench_out);
    } else if (*srv) {
      auto config = engine_config(serve_config, serve_seed);
      auto store = service::WorkspaceStore::open(data_dir, serve_seed);
      if (store->ids().empty()) std::cerr << "warning: no datasets found under " << data_dir << "\n";

      // Block the signals before any thread starts so sigwait sees them.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);

      service::Server server(*store, {address, port, config});
      const auto bound = server.start();
      std::cout << "serving " << store->ids().size() << " dataset(s) on http://" << address << ":" << bound
                << std::endl;
      int sig = 0;
      sigwait(&signals, &sig);
      std::cout << "shutting down" << std::endl;
      server.stop();
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

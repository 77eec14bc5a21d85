// minidrive command-line front end.
//
//   minidrive sim run --map <file> [--listen ip:port] [--connect ip:port]
//                     [--speed N] [--headless-fast] [--duration s]
//                     [--record <file>] [--replay <file>] [--config <file>]
//                     [--ui-dir <dir>]
//   minidrive map validate <file>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "minidrive/bridge/host.hpp"
#include "minidrive/config.hpp"
#include "minidrive/environment.hpp"
#include "minidrive/simulator.hpp"

namespace {

using namespace minidrive;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct RunArgs {
  std::string config;
  std::string map;
  std::string listen;
  std::string connect;
  double speed = 1.0;
  bool headless_fast = false;
  std::optional<double> duration;
  std::string record;
  std::string replay;
  std::string ui_dir;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int validate_map(const std::string& path) {
  try {
    const WorldMap map = load_map_file(path);
    const auto violations = validate(map);
    for (const Violation& v : violations) std::cout << to_string(v) << '\n';
    return violations.empty() ? 0 : 1;
  } catch (const MapError& e) {
    std::cout << "load: " << e.what() << '\n';
    return 1;
  }
}

int run_sim(const RunArgs& args) {
  SimConfig config;
  std::string config_path = args.config;
  if (config_path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) config_path = env;
  }
  if (!config_path.empty()) config = load_sim_config_file(config_path);
  if (!args.map.empty()) config.map_path = args.map;
  if (config.map_path.empty()) {
    std::cerr << "sim run: no map given (--map or config 'map')\n";
    return 2;
  }
  config.validate();

  WorldMap map = load_map_file(config.map_path);
  for (const Violation& v : validate(map)) {
    spdlog::warn("map: {}", to_string(v));
  }
  Simulator sim(config, std::move(map));

  if (!args.replay.empty()) {
    std::ifstream in(args.replay);
    if (!in) {
      std::cerr << "sim run: cannot open replay file '" << args.replay << "'\n";
      return 2;
    }
    const ReplayResult result = replay(sim, in);
    std::cout << "replayed " << result.ticks << " ticks, telemetry sha256 "
              << result.telemetry_digest;
    if (!result.recorded_digest.empty()) {
      std::cout << (result.matches() ? " (matches recording)"
                                     : " (differs from recording " +
                                           result.recorded_digest + ")");
    }
    std::cout << '\n';
    return result.recorded_digest.empty() || result.matches() ? 0 : 1;
  }

  bridge::SimulationHost host(sim);
  bridge::EndpointOptions options;
  options.ui_dir = args.ui_dir;
  options.map_json = slurp(config.map_path);

  const bool any_endpoint = !args.listen.empty() || !args.connect.empty();
  if (!args.listen.empty() || !any_endpoint) {
    const auto cfg = args.listen.empty()
                         ? bridge::BridgeConfig{}
                         : bridge::BridgeConfig::parse(args.listen,
                                                       bridge::Role::kListen);
    host.add_endpoint(cfg, options);
  }
  if (!args.connect.empty()) {
    host.add_endpoint(
        bridge::BridgeConfig::parse(args.connect, bridge::Role::kConnect),
        options);
  }
  host.start();
  for (const auto& ep : host.endpoints()) {
    if (ep->config().role == bridge::Role::kListen) {
      spdlog::info("listening on ws://{}:{}", ep->config().ip, ep->local_port());
    } else {
      spdlog::info("dialling ws://{}:{}", ep->config().ip, ep->config().port);
    }
  }

  std::ofstream record;
  if (!args.record.empty()) {
    record.open(args.record);
    if (!record) {
      std::cerr << "sim run: cannot write '" << args.record << "'\n";
      return 2;
    }
    sim.start_recording(record);
  }

  bridge::RunOptions run;
  run.speed = args.speed;
  run.headless_fast = args.headless_fast;
  run.duration = args.duration;
  const auto ticks = host.run(run, g_stop);

  if (record.is_open()) sim.stop_recording();
  host.stop();
  spdlog::info("stopped after {} ticks ({:.3f} s simulated)", ticks,
               sim.clock().sim_time());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("minidrive"));

  CLI::App app{"minidrive: small-scale vehicle simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* sim = app.add_subcommand("sim", "Simulator commands");
  sim->require_subcommand(1);
  auto* run = sim->add_subcommand("run", "Run the simulator");
  run->add_option("--config", run_args.config,
                  "JSON config file (default: $MINIDRIVE_CONFIG)");
  run->add_option("--map", run_args.map, "Map file");
  run->add_option("--listen", run_args.listen,
                  "Accept bridge peers on ip:port (default 127.0.0.1:4567)");
  run->add_option("--connect", run_args.connect, "Dial a bridge server");
  run->add_option("--speed", run_args.speed, "Real-time multiplier")
      ->check(CLI::PositiveNumber);
  run->add_flag("--headless-fast", run_args.headless_fast,
                "Run as fast as possible");
  run->add_option("--duration", run_args.duration,
                  "Stop after this many simulated seconds")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--record", run_args.record, "Record inputs to a file");
  run->add_option("--replay", run_args.replay, "Replay a recording");
  run->add_option("--ui-dir", run_args.ui_dir, "Serve UI assets from here");
  run->get_option("--record")->excludes(run->get_option("--replay"));

  std::string map_file;
  auto* map = app.add_subcommand("map", "Map tools");
  map->require_subcommand(1);
  auto* validate_cmd = map->add_subcommand("validate", "Check a map file");
  validate_cmd->add_option("file", map_file, "Map file")->required();

  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    if (*validate_cmd) return validate_map(map_file);
    if (*run) return run_sim(run_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

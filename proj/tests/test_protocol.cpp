#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "minidrive/bridge/protocol.hpp"
#include "support/oracles.hpp"

using namespace minidrive;
using namespace minidrive::bridge;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(MINIDRIVE_SOURCE_DIR) + "/tests/golden/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

CommandMessage command(double throttle, double steering,
                       std::optional<Headlights> h = {},
                       std::optional<Indicators> i = {},
                       CommandSource source = CommandSource::kAutonomous) {
  CommandMessage m;
  m.command = ActuatorCommand(throttle, steering);
  m.lamps = {h, i};
  m.source = source;
  return m;
}

Telemetry random_telemetry(oracle::Gen& gen) {
  Telemetry t;
  t.time = gen.integer(0, 100000) * 0.005;
  t.mode = gen.coin() ? DrivingMode::kManual : DrivingMode::kAutonomous;
  t.gear = gen.coin() ? Gear::kDrive : Gear::kReverse;
  t.speed = gen.uniform(0, 0.45);
  t.throttle = gen.uniform(-1, 1);
  t.steering = gen.uniform(-1, 1);
  t.encoder_ticks = {gen.integer(-100000, 100000), gen.integer(-100000, 100000)};
  t.encoder_angles = {gen.uniform(-1e4, 1e4), gen.uniform(-1e4, 1e4)};
  t.ips = Vector3(gen.uniform(-10, 10), gen.uniform(-10, 10), 0.0);
  t.imu.orientation = Eigen::Quaterniond(
      Eigen::AngleAxisd(gen.uniform(-3, 3), Vector3::UnitZ()));
  t.imu.euler = Vector3(0, 0, gen.uniform(-3, 3));
  t.imu.angular_velocity = Vector3(0, 0, gen.uniform(-2, 2));
  t.imu.linear_acceleration = Vector3(gen.uniform(-2, 2), gen.uniform(-2, 2), 9.81);
  for (int i = 0; i < kLidarRays; ++i) {
    t.lidar.ranges[i] = gen.uniform(0.15, 12.0);
    t.lidar.intensities[i] = gen.uniform(0.0, 1.0);
  }
  t.lamps.headlights = static_cast<Headlights>(gen.integer(0, 2));
  t.lamps.indicators = static_cast<Indicators>(gen.integer(0, 3));
  t.lamps.taillight = static_cast<Taillight>(gen.integer(0, 2));
  t.lamps.reverse_on = gen.coin();
  t.lamps.blink_phase_on = blink_phase(t.time);
  t.scene_light = gen.coin();
  return t;
}

}  // namespace

TEST(Golden, CommandFrames) {
  const std::pair<const char*, CommandMessage> cases[] = {
      {"command_basic.json", command(0.5, -0.2)},
      {"command_lamps.json",
       command(-1.0, 1.0, Headlights::kHighBeam, Indicators::kHazard)},
      {"command_manual.json", command(0.25, 0.0, std::nullopt, Indicators::kLeft,
                                      CommandSource::kManual)},
  };
  for (const auto& [file, expected] : cases) {
    const std::string text = golden(file);
    const InboundMessage msg = decode_inbound(text);
    ASSERT_TRUE(std::holds_alternative<CommandMessage>(msg)) << file;
    EXPECT_EQ(std::get<CommandMessage>(msg), expected) << file;
    EXPECT_EQ(encode_command(expected), text) << file;
  }
}

TEST(Golden, ControlFrames) {
  EXPECT_EQ(encode_control(ControlAction::kReset), golden("control_reset.json"));
  EXPECT_EQ(std::get<ControlMessage>(decode_inbound(golden("control_reset.json"))),
            ControlMessage{ControlAction::kReset});
  EXPECT_EQ(encode_control(ControlAction::kSceneLightOff),
            golden("control_scene_light_off.json"));
}

TEST(Golden, IdleTelemetry) {
  Telemetry t;
  t.ips = Vector3(0.9, 0.9, 0.0);
  t.lamps.taillight = Taillight::kBright;
  const std::string text = golden("telemetry_idle.json");
  EXPECT_EQ(encode_telemetry(t), text);
  EXPECT_EQ(decode_telemetry(text), t);
}

TEST(Telemetry, RoundTripIsIdentity) {
  oracle::Gen gen(71);
  for (int i = 0; i < 300; ++i) {
    const Telemetry t = random_telemetry(gen);
    const std::string text = encode_telemetry(t);
    ASSERT_EQ(decode_telemetry(text), t);
    ASSERT_EQ(encode_telemetry(decode_telemetry(text)), text);
  }
}

TEST(Telemetry, LidarAlwaysHas360Values) {
  const auto j = nlohmann::json::parse(encode_telemetry(Telemetry{}));
  EXPECT_EQ(j["lidar"]["ranges"].size(), 360u);
  EXPECT_EQ(j["lidar"]["intensities"].size(), 360u);
}

TEST(Inbound, ClampsAndDefaults) {
  auto c = std::get<CommandMessage>(
      decode_inbound(R"({"type":"command","throttle":7.0,"steering":-9})"));
  EXPECT_EQ(c.command, ActuatorCommand(1.0, -1.0));
  c = std::get<CommandMessage>(
      decode_inbound(R"({"type":"command","headlights":5,"indicators":-2})"));
  EXPECT_EQ(c.command, ActuatorCommand());
  EXPECT_EQ(c.lamps.headlights, Headlights::kHighBeam);
  EXPECT_EQ(c.lamps.indicators, Indicators::kOff);
  c = std::get<CommandMessage>(
      decode_inbound(R"({"type":"command","throttle":0.1,"future":{"x":1}})"));
  EXPECT_EQ(c.command.throttle(), 0.1);
}

TEST(Inbound, ClampMatchesCommandConstructor) {
  oracle::Gen gen(72);
  for (int i = 0; i < 1000; ++i) {
    const double th = gen.uniform(-5, 5);
    const double st = gen.uniform(-5, 5);
    nlohmann::json j{{"type", "command"}, {"throttle", th}, {"steering", st}};
    const auto c = std::get<CommandMessage>(decode_inbound(j.dump()));
    ASSERT_EQ(c.command, ActuatorCommand(th, st));
    ASSERT_LE(std::abs(c.command.throttle()), 1.0);
  }
}

TEST(Inbound, Rejects) {
  EXPECT_THROW(decode_inbound("not json"), ProtocolError);
  EXPECT_THROW(decode_inbound("[1,2]"), ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"throttle":1})"), ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"type":"warp"})"), ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"type":"control","action":"explode"})"),
               ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"type":"control"})"), ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"type":"command","throttle":"fast"})"),
               ProtocolError);
  EXPECT_THROW(decode_inbound(R"({"type":"command","source":"robot"})"),
               ProtocolError);
  EXPECT_THROW(decode_inbound(encode_telemetry(Telemetry{})), ProtocolError);
}

TEST(Dispatch, DriveFieldsOnlyInAutonomousLampsAlways) {
  const WorldMap m(1.8, std::vector(3, std::vector(3, Tile{})), {}, true, false);
  SimConfig c;
  c.initial_pose = Pose2D(1.0, 2.7, 0.0);
  Simulator sim(c, m);
  oracle::Gen gen(73);
  for (int i = 0; i < 500; ++i) {
    if (gen.integer(0, 4) == 0) {
      dispatch(ControlMessage{gen.coin() ? ControlAction::kModeManual
                                         : ControlAction::kModeAutonomous},
               sim);
    }
    const CommandMessage msg =
        command(gen.uniform(-1, 1), gen.uniform(-1, 1),
                static_cast<Headlights>(gen.integer(0, 2)),
                static_cast<Indicators>(gen.integer(0, 3)));
    const ActuatorCommand before = sim.active_command();
    dispatch(msg, sim);
    sim.tick();
    if (sim.mode() == DrivingMode::kAutonomous) {
      ASSERT_EQ(sim.active_command(), msg.command);
    } else {
      ASSERT_EQ(sim.active_command(), before);
    }
    ASSERT_EQ(sim.signals().headlights, *msg.lamps.headlights);
    ASSERT_EQ(sim.signals().indicators, *msg.lamps.indicators);
  }
}

TEST(Dispatch, ControlReset) {
  const WorldMap m(1.8, {{Tile{}}}, {}, false, false);
  Simulator sim(SimConfig{}, m);
  sim.set_manual_command(ActuatorCommand(1.0, 0.0));
  for (int i = 0; i < 100; ++i) sim.tick();
  dispatch(decode_inbound(R"({"type":"control","action":"reset"})"), sim);
  EXPECT_EQ(sim.clock().tick_count, 0);
  EXPECT_EQ(sim.vehicle().speed, 0.0);
}

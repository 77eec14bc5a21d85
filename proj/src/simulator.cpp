#include "minidrive/simulator.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "minidrive/bridge/protocol.hpp"
#include "minidrive/config.hpp"

namespace minidrive {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

constexpr std::string_view kRecordingTag = "minidrive-recording";

struct ActionName {
  ControlAction action;
  std::string_view name;
};

constexpr std::array<ActionName, 5> kActionNames = {{
    {ControlAction::kReset, "reset"},
    {ControlAction::kModeManual, "mode_manual"},
    {ControlAction::kModeAutonomous, "mode_autonomous"},
    {ControlAction::kSceneLightOn, "scene_light_on"},
    {ControlAction::kSceneLightOff, "scene_light_off"},
}};

// Everything that must agree for a replay to reproduce a recording. The map
// path is left out; the map content is compared instead.
OrderedJson fingerprint(const SimConfig& config, const WorldMap& map) {
  OrderedJson f = sim_config_to_json(config);
  f.erase("map");
  TelemetryDigest map_digest;
  map_digest.add(dump_map(map));
  f["map_sha256"] = map_digest.hex();
  return f;
}

OrderedJson lamp_fields(const LampRequest& r) {
  OrderedJson j = OrderedJson::object();
  if (r.headlights) j["headlights"] = static_cast<int>(*r.headlights);
  if (r.indicators) j["indicators"] = static_cast<int>(*r.indicators);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

struct TelemetryDigest::State {
  EVP_MD_CTX* ctx = nullptr;
};

TelemetryDigest::TelemetryDigest() : state_(std::make_unique<State>()) {
  state_->ctx = EVP_MD_CTX_new();
  if (state_->ctx == nullptr ||
      EVP_DigestInit_ex(state_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("cannot initialise SHA-256");
  }
}

TelemetryDigest::~TelemetryDigest() { EVP_MD_CTX_free(state_->ctx); }

void TelemetryDigest::add(std::string_view frame) {
  EVP_DigestUpdate(state_->ctx, frame.data(), frame.size());
  // Frame separator so ["ab","c"] and ["a","bc"] differ.
  EVP_DigestUpdate(state_->ctx, "\n", 1);
}

void TelemetryDigest::add(const Telemetry& t) {
  add(bridge::encode_telemetry(t));
}

std::string TelemetryDigest::hex() const {
  EVP_MD_CTX* copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, state_->ctx);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, md.data(), &len);
  EVP_MD_CTX_free(copy);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0x0F];
  }
  return out;
}

// ---------------------------------------------------------------------------

class Recorder {
 public:
  Recorder(std::ostream& out, const OrderedJson& header) : out_(out) {
    out_ << header.dump() << '\n';
  }

  void event(OrderedJson fields) {
    OrderedJson line;
    line["step"] = steps_;
    for (auto& [key, value] : fields.items()) line[key] = value;
    out_ << line.dump() << '\n';
  }

  void on_tick() { ++steps_; }
  void on_telemetry(const Telemetry& t) { digest_.add(t); }

  void finish() {
    OrderedJson trailer;
    trailer["end_step"] = steps_;
    trailer["telemetry_sha256"] = digest_.hex();
    out_ << trailer.dump() << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::int64_t steps_ = 0;
  TelemetryDigest digest_;
};

// ---------------------------------------------------------------------------

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("config: dt must be positive");
  }
  if (!(telemetry_rate > 0.0) || !(lidar.rate_hz > 0.0)) {
    throw std::invalid_argument("config: sensor rates must be positive");
  }
  if (!(lidar.min_range > 0.0) || !(lidar.max_range > lidar.min_range)) {
    throw std::invalid_argument("config: lidar ranges must satisfy 0 < min < max");
  }
  if (!(collision.vehicle_mass > 0.0) || !(collision.slop > 0.0) ||
      !(collision.box_friction_decel >= 0.0)) {
    throw std::invalid_argument("config: bad collision parameters");
  }
  if (!(ips_noise_std >= 0.0)) {
    throw std::invalid_argument("config: ips_noise_std must be >= 0");
  }
  geometry.validate();
  limits.validate();
}

std::string_view to_string(DrivingMode mode) {
  return mode == DrivingMode::kAutonomous ? "autonomous" : "manual";
}

std::string_view to_string(ControlAction action) {
  for (const auto& entry : kActionNames) {
    if (entry.action == action) return entry.name;
  }
  return "unknown";
}

std::optional<ControlAction> parse_control_action(std::string_view name) {
  for (const auto& entry : kActionNames) {
    if (entry.name == name) return entry.action;
  }
  return std::nullopt;
}

RateSchedule::RateSchedule(double rate_hz, double dt)
    : ticks_per_emission_(1.0 / (rate_hz * dt)), next_tick_(threshold_tick(1)) {}

std::int64_t RateSchedule::threshold_tick(std::int64_t k) const {
  // First tick whose time k_tick * dt reaches k / rate. The small relative
  // allowance absorbs rounding when the threshold falls exactly on a tick.
  const double exact = static_cast<double>(k) * ticks_per_emission_;
  return static_cast<std::int64_t>(std::ceil(exact * (1.0 - 1e-12)));
}

bool RateSchedule::due(std::int64_t tick_count) {
  if (tick_count < next_tick_) return false;
  ++next_k_;
  next_tick_ = threshold_tick(next_k_);
  return true;
}

void RateSchedule::reset() {
  next_k_ = 1;
  next_tick_ = threshold_tick(1);
}

// ---------------------------------------------------------------------------

Simulator::Simulator(SimConfig config, WorldMap map)
    : config_((config.validate(), std::move(config))),
      initial_world_(map),
      world_(std::move(map)),
      ips_(config_.ips_noise_std, config_.noise_seed),
      lidar_schedule_(config_.lidar.rate_hz, config_.dt),
      telemetry_schedule_(config_.telemetry_rate, config_.dt) {
  clock_.dt = config_.dt;
  restore_initial();
}

Simulator::~Simulator() = default;

void Simulator::restore_initial() {
  world_ = initial_world_;
  clock_.tick_count = 0;
  state_ = VehicleState::at_rest(config_.initial_pose);
  manual_command_ = {};
  autonomous_command_ = {};
  lamp_request_ = {Headlights::kOff, Indicators::kOff};
  signals_ = update_signals(SignalState{}, lamp_request_, state_.gear,
                            state_.braking, 0.0);
  encoders_ = update_encoders(EncoderState{}, 0.0, 0.0);
  lidar_schedule_.reset();
  telemetry_schedule_.reset();
  ips_.reseed();
  last_contact_ = false;
  latest_scan_ = lidar_scan(state_, world_, config_.geometry, config_.lidar);
}

ActuatorCommand Simulator::active_command() const {
  return mode_ == DrivingMode::kManual ? manual_command_ : autonomous_command_;
}

void Simulator::tick() {
  const double dt = config_.dt;
  const VehicleState before = state_;
  state_ = step(state_, active_command(), dt, config_.geometry, config_.limits);

  const Vector2 forward = heading(state_.pose.yaw);
  const CollisionOutcome contact =
      resolve_collisions(world_, vehicle_body(state_.pose, config_.geometry),
                         state_.speed * forward, dt, config_.collision);
  last_contact_ = contact.contact;
  if (contact.contact) {
    const double v_max = max_speed(config_.limits, config_.geometry);
    state_.pose.position += contact.vehicle_displacement;
    state_.speed =
        std::clamp(contact.vehicle_velocity.dot(forward), -v_max, v_max);
    state_.yaw_rate = state_.speed * std::tan(state_.steer_angle) /
                      config_.geometry.wheelbase;
    state_.accel_body = Vector2((state_.speed - before.speed) / dt,
                                state_.speed * state_.yaw_rate);
  }

  ++clock_.tick_count;
  const double now = clock_.sim_time();
  signals_ = update_signals(signals_, lamp_request_, state_.gear,
                            state_.braking, now);
  encoders_ = update_encoders(encoders_, state_.wheel_angle_left,
                              state_.wheel_angle_right);
  if (recorder_) recorder_->on_tick();

  if (lidar_schedule_.due(clock_.tick_count)) {
    latest_scan_ = lidar_scan(state_, world_, config_.geometry, config_.lidar);
  }
  if (telemetry_schedule_.due(clock_.tick_count)) {
    const Telemetry t = telemetry();
    if (recorder_) recorder_->on_telemetry(t);
    if (sink_) sink_(t);
  }
}

Telemetry Simulator::telemetry() {
  Telemetry t;
  t.time = clock_.sim_time();
  t.mode = mode_;
  t.gear = state_.gear;
  t.speed = std::abs(state_.speed);
  t.throttle = read_throttle(state_, config_.geometry, config_.limits);
  t.steering = read_steering(state_, config_.limits);
  t.encoder_ticks = {encoders_.ticks_left, encoders_.ticks_right};
  t.encoder_angles = {encoders_.angle_left, encoders_.angle_right};
  t.ips = ips_.read(state_);
  t.imu = read_imu(state_);
  t.lidar = latest_scan_;
  t.lamps = signals_;
  t.scene_light = scene_light_;
  return t;
}

void Simulator::reset() {
  if (recorder_) recorder_->event({{"control", to_string(ControlAction::kReset)}});
  restore_initial();
}

void Simulator::set_mode(DrivingMode mode) {
  apply(mode == DrivingMode::kManual ? ControlAction::kModeManual
                                     : ControlAction::kModeAutonomous);
}

void Simulator::set_scene_light(bool on) {
  apply(on ? ControlAction::kSceneLightOn : ControlAction::kSceneLightOff);
}

void Simulator::apply(ControlAction action) {
  switch (action) {
    case ControlAction::kReset:
      reset();
      return;
    case ControlAction::kModeManual:
      mode_ = DrivingMode::kManual;
      break;
    case ControlAction::kModeAutonomous:
      mode_ = DrivingMode::kAutonomous;
      break;
    case ControlAction::kSceneLightOn:
      scene_light_ = true;
      break;
    case ControlAction::kSceneLightOff:
      scene_light_ = false;
      break;
  }
  if (recorder_) recorder_->event({{"control", to_string(action)}});
}

void Simulator::set_manual_command(const ActuatorCommand& cmd) {
  if (cmd == manual_command_) return;
  manual_command_ = cmd;
  if (recorder_) {
    recorder_->event({{"manual", {cmd.throttle(), cmd.steering()}}});
  }
}

void Simulator::set_autonomous_command(const ActuatorCommand& cmd) {
  if (cmd == autonomous_command_) return;
  autonomous_command_ = cmd;
  if (recorder_) {
    recorder_->event({{"autonomous", {cmd.throttle(), cmd.steering()}}});
  }
}

void Simulator::request_lamps(const LampRequest& request) {
  if (!request.headlights && !request.indicators) return;
  if (request.headlights) lamp_request_.headlights = request.headlights;
  if (request.indicators) lamp_request_.indicators = request.indicators;
  if (recorder_) recorder_->event({{"lamps", lamp_fields(request)}});
}

void Simulator::start_recording(std::ostream& out) {
  recorder_.reset();
  restore_initial();
  OrderedJson header;
  header["recording"] = kRecordingTag;
  header["v"] = bridge::kProtocolVersion;
  header["mode"] = to_string(mode_);
  header["scene_light"] = scene_light_;
  header["config"] = fingerprint(config_, initial_world_);
  recorder_ = std::make_unique<Recorder>(out, header);
}

void Simulator::stop_recording() {
  if (!recorder_) return;
  recorder_->finish();
  recorder_.reset();
}

// ---------------------------------------------------------------------------

ReplayResult replay(Simulator& sim, std::istream& source) {
  ReplayResult result;
  std::string line;
  if (!std::getline(source, line) || line.empty()) return result;

  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("recording header: ") + e.what());
  }
  if (!header.is_object() || header.value("recording", "") != kRecordingTag) {
    throw std::invalid_argument("not a minidrive recording");
  }
  const Json expected = Json::parse(
      fingerprint(sim.config(), sim.initial_world()).dump());
  if (header.at("config") != expected) {
    throw ConfigMismatch(
        "recording was made with a different configuration or map");
  }

  std::multimap<std::int64_t, Json> events;
  std::int64_t end_step = 0;
  while (std::getline(source, line)) {
    if (line.empty()) continue;
    Json entry = Json::parse(line);
    if (entry.contains("end_step")) {
      end_step = entry.at("end_step").get<std::int64_t>();
      result.recorded_digest = entry.value("telemetry_sha256", "");
      continue;
    }
    const auto step = entry.at("step").get<std::int64_t>();
    end_step = std::max(end_step, step);
    events.emplace(step, std::move(entry));
  }

  // Replay drives the simulator through its public inputs, so run it from
  // initial conditions with the recorded mode.
  sim.stop_recording();
  sim.reset();
  sim.set_mode(header.at("mode") == "autonomous" ? DrivingMode::kAutonomous
                                                 : DrivingMode::kManual);
  sim.set_scene_light(header.at("scene_light").get<bool>());

  TelemetryDigest digest;
  auto apply_event = [&sim](const Json& e) {
    if (const auto it = e.find("control"); it != e.end()) {
      const auto action = parse_control_action(it->get<std::string>());
      if (!action) throw std::invalid_argument("recording: unknown control");
      sim.apply(*action);
    } else if (const auto m = e.find("manual"); m != e.end()) {
      sim.set_manual_command(ActuatorCommand((*m)[0].get<double>(),
                                             (*m)[1].get<double>()));
    } else if (const auto a = e.find("autonomous"); a != e.end()) {
      sim.set_autonomous_command(ActuatorCommand((*a)[0].get<double>(),
                                                 (*a)[1].get<double>()));
    } else if (const auto l = e.find("lamps"); l != e.end()) {
      LampRequest r;
      if (l->contains("headlights")) {
        r.headlights = static_cast<Headlights>(l->at("headlights").get<int>());
      }
      if (l->contains("indicators")) {
        r.indicators = static_cast<Indicators>(l->at("indicators").get<int>());
      }
      sim.request_lamps(r);
    }
  };

  Simulator::TelemetrySink forward = sim.exchange_telemetry_sink(nullptr);
  sim.set_telemetry_sink([&digest, &forward](const Telemetry& t) {
    digest.add(t);
    if (forward) forward(t);
  });
  auto next = events.begin();
  for (std::int64_t step = 0; step <= end_step; ++step) {
    for (; next != events.end() && next->first == step; ++next) {
      apply_event(next->second);
    }
    if (step < end_step) {
      sim.tick();
      ++result.ticks;
    }
  }
  sim.set_telemetry_sink(std::move(forward));
  result.telemetry_digest = digest.hex();
  return result;
}

}  // namespace minidrive

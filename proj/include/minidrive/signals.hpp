#pragma once

#include <optional>

#include "minidrive/dynamics.hpp"

namespace minidrive {

// Wire values are the enumerator values.
enum class Headlights : int { kOff = 0, kLowBeam = 1, kHighBeam = 2 };
enum class Indicators : int { kOff = 0, kLeft = 1, kRight = 2, kHazard = 3 };
enum class Taillight : int { kOff = 0, kPartial = 1, kBright = 2 };

inline constexpr double kDefaultBlinkHz = 1.0;

/// Lamp changes requested by the driver or the autonomy stack. An empty
/// field keeps the previous setting.
struct LampRequest {
  std::optional<Headlights> headlights;
  std::optional<Indicators> indicators;

  friend bool operator==(const LampRequest&, const LampRequest&) = default;
};

struct SignalState {
  Headlights headlights = Headlights::kOff;
  Indicators indicators = Indicators::kOff;
  Taillight taillight = Taillight::kOff;
  bool reverse_on = false;
  bool blink_phase_on = true;

  bool left_indicator_lit() const {
    return blink_phase_on && (indicators == Indicators::kLeft ||
                              indicators == Indicators::kHazard);
  }
  bool right_indicator_lit() const {
    return blink_phase_on && (indicators == Indicators::kRight ||
                              indicators == Indicators::kHazard);
  }

  friend bool operator==(const SignalState&, const SignalState&) = default;
};

/// 50% duty square wave, on during the first half of each period.
bool blink_phase(double sim_time, double blink_hz = kDefaultBlinkHz);

/// Brake and reverse lamps follow the drivetrain; headlights and indicators
/// follow the request.
SignalState update_signals(const SignalState& prev, const LampRequest& request,
                           Gear gear, bool braking, double sim_time,
                           double blink_hz = kDefaultBlinkHz);

}  // namespace minidrive

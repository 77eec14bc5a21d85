#include "minidrive/signals.hpp"

#include <cmath>

namespace minidrive {

bool blink_phase(double sim_time, double blink_hz) {
  const double half_periods = std::floor(sim_time * 2.0 * blink_hz);
  return std::fmod(half_periods, 2.0) == 0.0;
}

SignalState update_signals(const SignalState& prev, const LampRequest& request,
                           Gear gear, bool braking, double sim_time,
                           double blink_hz) {
  SignalState next;
  next.headlights = request.headlights.value_or(prev.headlights);
  next.indicators = request.indicators.value_or(prev.indicators);
  next.reverse_on = gear == Gear::kReverse;
  if (braking) {
    next.taillight = Taillight::kBright;
  } else if (next.headlights != Headlights::kOff) {
    next.taillight = Taillight::kPartial;
  } else {
    next.taillight = Taillight::kOff;
  }
  next.blink_phase_on = blink_phase(sim_time, blink_hz);
  return next;
}

}  // namespace minidrive

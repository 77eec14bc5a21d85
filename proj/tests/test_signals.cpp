#include <gtest/gtest.h>

#include "minidrive/signals.hpp"
#include "support/oracles.hpp"

using namespace minidrive;

TEST(Signals, BlinkPhase) {
  EXPECT_TRUE(blink_phase(0.0));
  EXPECT_TRUE(blink_phase(0.49));
  EXPECT_FALSE(blink_phase(0.5));
  EXPECT_FALSE(blink_phase(0.99));
  EXPECT_TRUE(blink_phase(1.0));
  EXPECT_FALSE(blink_phase(0.25, 2.0));
}

TEST(Signals, Examples) {
  const LampRequest low{Headlights::kLowBeam, Indicators::kLeft};
  SignalState s = update_signals({}, low, Gear::kDrive, false, 0.1);
  EXPECT_EQ(s.headlights, Headlights::kLowBeam);
  EXPECT_EQ(s.taillight, Taillight::kPartial);
  EXPECT_TRUE(s.left_indicator_lit());
  EXPECT_FALSE(s.right_indicator_lit());
  s = update_signals(s, {}, Gear::kDrive, false, 0.6);
  EXPECT_EQ(s.headlights, Headlights::kLowBeam);  // omitted fields persist
  EXPECT_FALSE(s.left_indicator_lit());

  s = update_signals(s, {}, Gear::kDrive, true, 0.7);
  EXPECT_EQ(s.taillight, Taillight::kBright);
  s = update_signals(s, {Headlights::kOff, std::nullopt}, Gear::kDrive, false, 0.7);
  EXPECT_EQ(s.taillight, Taillight::kOff);
  s = update_signals(s, {}, Gear::kReverse, false, 0.7);
  EXPECT_TRUE(s.reverse_on);
  s = update_signals(s, {std::nullopt, Indicators::kHazard}, Gear::kDrive, false, 1.2);
  EXPECT_TRUE(s.left_indicator_lit());
  EXPECT_TRUE(s.right_indicator_lit());
  EXPECT_FALSE(s.reverse_on);
}

TEST(Signals, DerivedLampsFollowInputs) {
  oracle::Gen gen(61);
  SignalState s;
  for (int i = 0; i < 5000; ++i) {
    LampRequest req;
    if (gen.coin()) req.headlights = static_cast<Headlights>(gen.integer(0, 2));
    if (gen.coin()) req.indicators = static_cast<Indicators>(gen.integer(0, 3));
    const Gear gear = gen.coin() ? Gear::kDrive : Gear::kReverse;
    const bool braking = gen.coin();
    const double t = gen.uniform(0, 100);
    const SignalState prev = s;
    s = update_signals(s, req, gear, braking, t);
    ASSERT_EQ(s.headlights, req.headlights.value_or(prev.headlights));
    ASSERT_EQ(s.indicators, req.indicators.value_or(prev.indicators));
    ASSERT_EQ(s.reverse_on, gear == Gear::kReverse);
    const Taillight expected = braking ? Taillight::kBright
                               : s.headlights != Headlights::kOff
                                   ? Taillight::kPartial
                                   : Taillight::kOff;
    ASSERT_EQ(s.taillight, expected);
    ASSERT_EQ(s.blink_phase_on, static_cast<long>(std::floor(t * 2.0)) % 2 == 0);
  }
}

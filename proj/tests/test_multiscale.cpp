#include "memtransform/multiscale.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace memtransform;
using testutil::kind_of;

namespace {

double f_at(const MultiScaleFrame& f, std::size_t i) {
  switch (i) {
    case 0: return f.f0;
    case 1: return f.f1;
    case 2: return f.f2;
    case 3: return f.f3;
    default: return f.f4;
  }
}

} // namespace

TEST(ScaleBank, DefaultLengths) {
  const ScaleBank bank;
  const std::array<std::size_t, 4> want{4000, 400, 40, 4};
  EXPECT_EQ(bank.window_lengths(), want);
}

TEST(ScaleBank, AcceptsWholeSampleDurations) {
  ScaleBank bank;
  bank.window_durations = {1.0, 0.1, 0.0125, 0.0025};
  const std::array<std::size_t, 4> want{400, 40, 5, 1};
  EXPECT_EQ(bank.window_lengths(), want);
}

TEST(ScaleBank, RejectsBadConfigs) {
  ScaleBank bank;
  bank.window_durations = {10.0, 1.0, 0.1, 0.001};
  EXPECT_EQ(kind_of([&] { bank.window_lengths(); }), ErrorKind::Config);
  bank.window_durations = {10.0, 1.0, 1.0, 0.01};
  EXPECT_EQ(kind_of([&] { bank.window_lengths(); }), ErrorKind::Config);
  bank.window_durations = {10.0, 1.0, 0.1, 0.0033};
  EXPECT_EQ(kind_of([&] { bank.window_lengths(); }), ErrorKind::Config);
  bank = {};
  bank.sample_rate = 0.0;
  EXPECT_EQ(kind_of([&] { bank.window_lengths(); }), ErrorKind::Config);
  bank.sample_rate = 400.0;
  bank.window_durations = {10.0, 1.0, 0.1, -0.01};
  EXPECT_EQ(kind_of([&] { MultiScaleState s(bank); }), ErrorKind::Config);
}

TEST(MultiScale, SingleSample) {
  const std::vector<double> x{0.7};
  const auto frames = process(ScaleBank{}, x);
  ASSERT_EQ(frames.size(), 1u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(f_at(frames[0], i), 0.7);
  for (double b : frames[0].bands()) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(frames[0].time_index, 0u);
}

TEST(MultiScale, EmptyInput) {
  EXPECT_TRUE(process(ScaleBank{}, {}).empty());
}

TEST(MultiScale, ConstantInputGivesZeroBands) {
  for (double c : {0.0, 0.1, -3.7, 1e6, 1.0 / 3.0}) {
    const std::vector<double> x(9000, c);
    for (const auto& f : process(ScaleBank{}, x)) {
      for (std::size_t i = 0; i < 5; ++i) ASSERT_EQ(f_at(f, i), c);
      for (double b : f.bands()) ASSERT_EQ(b, 0.0);
    }
  }
}

TEST(MultiScale, StepResponseTiming) {
  constexpr std::size_t t0 = 5000;
  std::vector<double> x(t0 + 500, 0.0);
  for (std::size_t i = t0; i < x.size(); ++i) x[i] = 1.0;
  const auto frames = process(ScaleBank{}, x);
  // Step at t0: the 4-sample mean is full after samples t0..t0+3.
  EXPECT_LT(frames[t0 + 2].f3, 1.0);
  EXPECT_EQ(frames[t0 + 3].f3, 1.0);
  EXPECT_LT(frames[t0 + 398].f1, 1.0);
  EXPECT_EQ(frames[t0 + 399].f1, 1.0);
  EXPECT_EQ(frames[t0 + 39].f2, 1.0);
  EXPECT_LT(frames[t0 + 38].f2, 1.0);
}

TEST(MultiScale, WarmUpAveragesSeenSamples) {
  const auto x = oracle::uniform_signal(50, 9);
  const auto frames = process(ScaleBank{}, x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i];
    EXPECT_NEAR(frames[i].f0, s / double(i + 1), 1e-12);
    EXPECT_NEAR(frames[i].f1, s / double(i + 1), 1e-12);
  }
}

TEST(MultiScale, MatchesTrailingMeanOracle) {
  const auto x = oracle::uniform_signal(10000, 42);
  const auto frames = process(ScaleBank{}, x);
  const std::array<std::size_t, 4> w{4000, 400, 40, 4};
  double worst = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (std::size_t i = 0; i < 4; ++i) {
      const double want = oracle::trailing_mean(x, n, w[i]);
      const double got = f_at(frames[n], i);
      // Relative error, with a tiny absolute allowance for means that cross zero.
      worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-6));
    }
    EXPECT_EQ(frames[n].f4, x[n]);
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(MultiScale, TelescopingIdentity) {
  const auto x = oracle::uniform_signal(20000, 7);
  for (const auto& f : process(ScaleBank{}, x)) {
    ASSERT_NEAR(f.f10 + f.f21 + f.f32 + f.f43, f.f4 - f.f0, 1e-12);
    ASSERT_EQ(f.f10, f.f1 - f.f0);
    ASSERT_EQ(f.f43, f.f4 - f.f3);
  }
}

TEST(MultiScale, BatchEqualsPush) {
  const auto x = oracle::uniform_signal(6000, 3);
  const auto batch = process(ScaleBank{}, x);
  auto state = new_state(ScaleBank{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto f = state.push(x[i]);
    ASSERT_EQ(f.f0, batch[i].f0);
    ASSERT_EQ(f.f1, batch[i].f1);
    ASSERT_EQ(f.f2, batch[i].f2);
    ASSERT_EQ(f.f3, batch[i].f3);
    ASSERT_EQ(f.time_index, i);
  }
  EXPECT_EQ(state.samples_seen(), x.size());
}

TEST(MultiScale, NonFiniteSampleLeavesStateUntouched) {
  MultiScaleState a{ScaleBank{}}, b{ScaleBank{}};
  const auto x = oracle::uniform_signal(100, 1);
  for (double v : x) {
    a.push(v);
    b.push(v);
  }
  EXPECT_EQ(kind_of([&] { a.push(NAN); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { a.push(INFINITY); }), ErrorKind::InvalidInput);
  EXPECT_EQ(a.samples_seen(), 100u);
  const auto fa = a.push(0.25);
  const auto fb = b.push(0.25);
  EXPECT_EQ(fa.f0, fb.f0);
  EXPECT_EQ(fa.f3, fb.f3);
  EXPECT_EQ(fa.time_index, fb.time_index);
}

TEST(MultiScale, BandSelectivityAtFiveHertz) {
  std::vector<double> x(8000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * 5.0 * static_cast<double>(i) / 400.0);
  }
  const auto frames = process(ScaleBank{}, x);
  std::vector<double> f10, f21, f43;
  for (std::size_t i = 4000; i < frames.size(); ++i) {
    f10.push_back(frames[i].f10);
    f21.push_back(frames[i].f21);
    f43.push_back(frames[i].f43);
  }
  EXPECT_GE(oracle::rms(f21), 3.0 * oracle::rms(f10));
  EXPECT_GE(oracle::rms(f21), 3.0 * oracle::rms(f43));
}

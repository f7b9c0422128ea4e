#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace memtransform {

inline constexpr std::size_t kNumScales = 4;
inline constexpr std::size_t kNumBands = 4;

// Causal rectangular averaging windows for f0..f3; f4 is the raw sample.
struct ScaleBank {
  double sample_rate = 400.0;
  std::array<double, kNumScales> window_durations{10.0, 1.0, 0.1, 0.01};

  // Throws Error(Config) if durations are not strictly decreasing or do not
  // map to a positive integer number of samples.
  std::array<std::size_t, kNumScales> window_lengths() const;
};

struct MultiScaleFrame {
  double f0 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double f4 = 0.0;
  double f10 = 0.0;
  double f21 = 0.0;
  double f32 = 0.0;
  double f43 = 0.0;
  std::uint64_t time_index = 0; // zero-based sample index

  // Bands in slow-to-fast order: f10, f21, f32, f43.
  std::array<double, kNumBands> bands() const { return {f10, f21, f32, f43}; }
};

// Streaming multi-scale averager. Each push is O(1) amortized: running sums
// are updated incrementally and recomputed from the history once per full
// rotation of their window to bound rounding drift. Samples are stored as
// offsets from the first sample, so a constant input yields bands of exactly 0.
class MultiScaleState {
 public:
  explicit MultiScaleState(const ScaleBank& bank);

  MultiScaleFrame push(double sample);

  std::uint64_t samples_seen() const { return seen_; }
  const std::array<std::size_t, kNumScales>& window_lengths() const { return lengths_; }
  double sample_rate() const { return sample_rate_; }

 private:
  double sum_of_last(std::size_t count) const;
  double at_age(std::size_t age) const; // age 0 = newest sample

  double sample_rate_;
  std::array<std::size_t, kNumScales> lengths_;
  double reference_ = 0.0;
  std::vector<double> history_; // ring of the last max(W) offsets
  std::size_t head_ = 0;        // slot of the newest sample
  std::array<double, kNumScales> sums_{};
  std::array<std::size_t, kNumScales> since_resum_{};
  std::uint64_t seen_ = 0;
};

MultiScaleState new_state(const ScaleBank& bank);

std::vector<MultiScaleFrame> process(const ScaleBank& bank, std::span<const double> signal);

} // namespace memtransform

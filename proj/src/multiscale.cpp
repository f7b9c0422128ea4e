#include "memtransform/multiscale.hpp"

#include "memtransform/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memtransform {

std::array<std::size_t, kNumScales> ScaleBank::window_lengths() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorKind::Config, "scale bank: sample_rate must be positive");
  }
  std::array<std::size_t, kNumScales> lengths{};
  for (std::size_t i = 0; i < kNumScales; ++i) {
    const double d = window_durations[i];
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorKind::Config, "scale bank: window durations must be positive");
    }
    if (i > 0 && !(d < window_durations[i - 1])) {
      throw Error(ErrorKind::Config, "scale bank: window durations must be strictly decreasing");
    }
    const double product = d * sample_rate;
    const double rounded = std::round(product);
    if (rounded < 1.0 || std::abs(product - rounded) > 1e-9 * std::max(1.0, product)) {
      throw Error(ErrorKind::Config, "scale bank: window of " + std::to_string(d) + " s at " +
                                         std::to_string(sample_rate) +
                                         " Hz is not a whole number of samples");
    }
    lengths[i] = static_cast<std::size_t>(rounded);
  }
  return lengths;
}

MultiScaleState::MultiScaleState(const ScaleBank& bank)
    : sample_rate_(bank.sample_rate), lengths_(bank.window_lengths()) {
  history_.assign(*std::max_element(lengths_.begin(), lengths_.end()), 0.0);
  head_ = history_.size() - 1;
}

double MultiScaleState::at_age(std::size_t age) const {
  const std::size_t n = history_.size();
  return history_[(head_ + n - age) % n];
}

double MultiScaleState::sum_of_last(std::size_t count) const {
  double s = 0.0;
  for (std::size_t age = count; age-- > 0;) {
    s += at_age(age);
  }
  return s;
}

MultiScaleFrame MultiScaleState::push(double sample) {
  if (!std::isfinite(sample)) {
    throw Error(ErrorKind::InvalidInput, "multiscale: non-finite sample");
  }
  const std::size_t n = history_.size();
  // Samples leaving each window, read before the ring slot is overwritten.
  std::array<double, kNumScales> leaving{};
  for (std::size_t i = 0; i < kNumScales; ++i) {
    if (seen_ >= lengths_[i]) leaving[i] = at_age(lengths_[i] - 1);
  }
  if (seen_ == 0) reference_ = sample;
  const double deviation = sample - reference_;
  head_ = (head_ + 1) % n;
  history_[head_] = deviation;
  ++seen_;

  std::array<double, kNumScales> means{};
  for (std::size_t i = 0; i < kNumScales; ++i) {
    const std::size_t w = lengths_[i];
    if (++since_resum_[i] >= w) {
      since_resum_[i] = 0;
      sums_[i] = sum_of_last(static_cast<std::size_t>(std::min<std::uint64_t>(w, seen_)));
    } else {
      sums_[i] += deviation - leaving[i];
    }
    const auto count = static_cast<double>(std::min<std::uint64_t>(w, seen_));
    means[i] = reference_ + sums_[i] / count;
  }

  MultiScaleFrame frame;
  frame.f0 = means[0];
  frame.f1 = means[1];
  frame.f2 = means[2];
  frame.f3 = means[3];
  frame.f4 = sample;
  frame.f10 = frame.f1 - frame.f0;
  frame.f21 = frame.f2 - frame.f1;
  frame.f32 = frame.f3 - frame.f2;
  frame.f43 = frame.f4 - frame.f3;
  frame.time_index = seen_ - 1;
  return frame;
}

MultiScaleState new_state(const ScaleBank& bank) { return MultiScaleState(bank); }

std::vector<MultiScaleFrame> process(const ScaleBank& bank, std::span<const double> signal) {
  MultiScaleState state(bank);
  std::vector<MultiScaleFrame> frames;
  frames.reserve(signal.size());
  for (double v : signal) frames.push_back(state.push(v));
  return frames;
}

} // namespace memtransform

#include "memtransform/alert.hpp"

#include "memtransform/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memtransform {

void EventDetectorConfig::validate() const {
  if (!std::isfinite(enter_threshold) || !std::isfinite(exit_threshold) ||
      !(exit_threshold < enter_threshold)) {
    throw Error(ErrorKind::Config, "detector: exit_threshold must be below enter_threshold");
  }
  if (!(min_duration > 0.0) || !std::isfinite(min_duration)) {
    throw Error(ErrorKind::Config, "detector: min_duration must be positive");
  }
  if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor)) {
    throw Error(ErrorKind::Config, "detector: noise_floor must be >= 0");
  }
}

void AlertConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!positive(tau)) throw Error(ErrorKind::Config, "alert: tau must be positive");
  if (!positive(cap)) throw Error(ErrorKind::Config, "alert: cap must be positive");
  if (!positive(sep_ref) || !positive(fast_ref) || !positive(width_ref)) {
    throw Error(ErrorKind::Config, "alert: reference values must be positive");
  }
  if (!nonneg(w_sep) || !nonneg(w_fast) || !nonneg(w_width)) {
    throw Error(ErrorKind::Config, "alert: weights must be >= 0");
  }
}

EventDetector::EventDetector(const EventDetectorConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<Event> EventDetector::push(double time, double value) {
  if (!std::isfinite(time) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidInput, "detector: non-finite sample");
  }
  if (last_time_ && !(time > *last_time_)) {
    throw Error(ErrorKind::InvalidInput,
                "detector: timestamps must be strictly increasing (" + std::to_string(time) +
                    " after " + std::to_string(*last_time_) + ")");
  }
  last_time_ = time;
  const double magnitude = std::abs(value);

  if (!open_) {
    if (magnitude > cfg_.enter_threshold) {
      open_ = time;
      peak_ = magnitude;
    }
    return std::nullopt;
  }
  if (magnitude >= cfg_.exit_threshold) {
    peak_ = std::max(peak_, magnitude);
    return std::nullopt;
  }

  const double onset = *open_;
  open_.reset();
  const double width = time - onset;
  if (width < cfg_.min_duration) return std::nullopt;

  Event ev;
  ev.onset = onset;
  ev.width = width;
  ev.peak = peak_;
  if (last_close_) ev.separation = onset - *last_close_;
  last_close_ = time;
  return ev;
}

void CycleCounter::push(double value) {
  if (value > noise_floor_ && sign_ != 1) {
    sign_ = 1;
    ++lobes_;
  } else if (value < -noise_floor_ && sign_ != -1) {
    sign_ = -1;
    ++lobes_;
  }
}

std::vector<Event> detect_events(std::span<const TimedValue> f10_series,
                                 const EventDetectorConfig& cfg) {
  EventDetector detector(cfg);
  std::vector<Event> events;
  for (const auto& s : f10_series) {
    if (auto ev = detector.push(s.time, s.value)) events.push_back(*ev);
  }
  return events;
}

namespace {

double cycle_value(const MultiScaleFrame& f, CycleBand band) {
  return band == CycleBand::F32 ? f.f32 : f.f43;
}

} // namespace

std::size_t count_fast_cycles(std::span<const MultiScaleFrame> frames, double sample_rate,
                              const Event& event, const EventDetectorConfig& cfg) {
  // Index bounds avoid comparing accumulated floating-point times.
  const auto first = static_cast<std::uint64_t>(std::llround(event.onset * sample_rate));
  const auto last = static_cast<std::uint64_t>(std::llround((event.onset + event.width) * sample_rate));
  CycleCounter counter(cfg.noise_floor);
  for (const auto& f : frames) {
    if (f.time_index >= first && f.time_index < last) counter.push(cycle_value(f, cfg.cycle_band));
  }
  return counter.cycles();
}

double event_increment(const Event& event, const AlertConfig& cfg) {
  double inc = 0.0;
  if (event.separation) {
    const double sep = *event.separation;
    inc += cfg.w_sep * (sep > 0.0 ? std::min(1.0, cfg.sep_ref / sep) : 1.0);
  }
  inc += cfg.w_fast * std::min(1.0, static_cast<double>(event.fast_cycles) / cfg.fast_ref);
  inc += cfg.w_width * std::min(1.0, event.width / cfg.width_ref);
  return inc;
}

AlertState alert_step(const AlertState& state, double now, const std::optional<Event>& event,
                      const AlertConfig& cfg) {
  if (!std::isfinite(now) || now < state.last_update) {
    throw Error(ErrorKind::InvalidInput, "alert_step: time must not go backwards");
  }
  AlertState next;
  next.last_update = now;
  next.level = state.level * std::exp(-(now - state.last_update) / cfg.tau);
  if (event) next.level += event_increment(*event, cfg);
  next.level = std::clamp(next.level, 0.0, cfg.cap);
  return next;
}

AlertRun run_alert(std::span<const MultiScaleFrame> frames, double sample_rate,
                   const EventDetectorConfig& detector_cfg, const AlertConfig& alert_cfg) {
  alert_cfg.validate();
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::Config, "alert: sample_rate must be positive");
  EventDetector detector(detector_cfg);
  CycleCounter counter(detector_cfg.noise_floor);

  AlertRun run;
  run.samples.reserve(frames.size());
  AlertState state;
  std::optional<std::size_t> open_sample;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const double t = static_cast<double>(f.time_index) / sample_rate;
    const bool was_open = detector.in_event();
    auto ev = detector.push(t, f.f10);
    if (!was_open && detector.in_event()) {
      counter.reset();
      open_sample = i;
    }
    if (detector.in_event()) counter.push(cycle_value(f, detector_cfg.cycle_band));

    if (i == 0) state.last_update = t;
    if (ev) {
      ev->fast_cycles = counter.cycles();
      run.events.push_back(*ev);
      run.samples[*open_sample].event_onset = true;
    }
    state = alert_step(state, t, ev, alert_cfg);
    run.samples.push_back({t, f.f10, state.level, false, ev.has_value()});
    run.peak_level = std::max(run.peak_level, state.level);
  }
  return run;
}

std::vector<TimedValue> alert_series(std::span<const MultiScaleFrame> frames, double sample_rate,
                                     const EventDetectorConfig& detector_cfg,
                                     const AlertConfig& alert_cfg) {
  const auto run = run_alert(frames, sample_rate, detector_cfg, alert_cfg);
  std::vector<TimedValue> out;
  out.reserve(run.samples.size());
  for (const auto& s : run.samples) out.push_back({s.time, s.level});
  return out;
}

} // namespace memtransform

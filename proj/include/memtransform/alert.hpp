#pragma once

#include "memtransform/multiscale.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace memtransform {

enum class CycleBand { F32, F43 };

struct EventDetectorConfig {
  double enter_threshold = 0.2;
  double exit_threshold = 0.1;
  double min_duration = 0.25; // seconds
  double noise_floor = 0.3;   // excursions of the cycle band below this are ignored
  CycleBand cycle_band = CycleBand::F32;

  void validate() const;
};

struct Event {
  double onset = 0.0;  // seconds
  double width = 0.0;  // seconds
  double peak = 0.0;   // largest |f10| inside the event
  std::optional<double> separation; // onset minus previous event's end
  std::size_t fast_cycles = 0;
};

struct AlertConfig {
  double tau = 30.0;
  double w_sep = 1.0;
  double w_fast = 1.0;
  double w_width = 1.0;
  double sep_ref = 10.0;
  double fast_ref = 5.0;
  double width_ref = 10.0;
  double cap = 3.0;

  void validate() const;
};

struct AlertState {
  double level = 0.0;
  double last_update = 0.0;
};

struct TimedValue {
  double time = 0.0;
  double value = 0.0;
};

// Dual-threshold detector on |f10|. An event opens on the first sample with
// |v| > enter_threshold and closes on the first later sample with
// |v| < exit_threshold; the event spans [open, close). Events shorter than
// min_duration are dropped, and an event still open when the input ends is
// never reported.
class EventDetector {
 public:
  explicit EventDetector(const EventDetectorConfig& cfg);

  // Returns the event that closes at this sample, if any.
  std::optional<Event> push(double time, double value);

  bool in_event() const { return open_.has_value(); }

 private:
  EventDetectorConfig cfg_;
  std::optional<double> open_;
  double peak_ = 0.0;
  std::optional<double> last_time_;
  std::optional<double> last_close_;
};

// Counts full oscillation cycles as pairs of alternating excursions beyond
// ±noise_floor.
class CycleCounter {
 public:
  explicit CycleCounter(double noise_floor) : noise_floor_(noise_floor) {}

  void push(double value);
  void reset() { lobes_ = 0; sign_ = 0; }
  std::size_t cycles() const { return lobes_ / 2; }

 private:
  double noise_floor_;
  std::size_t lobes_ = 0;
  int sign_ = 0;
};

std::vector<Event> detect_events(std::span<const TimedValue> f10_series,
                                 const EventDetectorConfig& cfg);

// Cycles of the configured band over frames whose time lies in
// [onset, onset + width).
std::size_t count_fast_cycles(std::span<const MultiScaleFrame> frames, double sample_rate,
                              const Event& event, const EventDetectorConfig& cfg);

// Increment added when an event is registered.
double event_increment(const Event& event, const AlertConfig& cfg);

AlertState alert_step(const AlertState& state, double now, const std::optional<Event>& event,
                      const AlertConfig& cfg);

struct AlertSample {
  double time = 0.0;
  double f10 = 0.0;
  double level = 0.0;
  bool event_onset = false;
  bool event_end = false;
};

struct AlertRun {
  std::vector<AlertSample> samples;
  std::vector<Event> events;
  double peak_level = 0.0;
};

// Detection, cycle counting and the alert level over a frame sequence. An
// event's increment is applied at the sample where it closes, the first
// moment all of its features are known.
AlertRun run_alert(std::span<const MultiScaleFrame> frames, double sample_rate,
                   const EventDetectorConfig& detector_cfg, const AlertConfig& alert_cfg);

std::vector<TimedValue> alert_series(std::span<const MultiScaleFrame> frames, double sample_rate,
                                     const EventDetectorConfig& detector_cfg,
                                     const AlertConfig& alert_cfg);

} // namespace memtransform

#include "memtransform/fingerprint.hpp"

#include "memtransform/error.hpp"

#include <algorithm>
#include <cmath>

namespace memtransform {

void AmplitudeCalibration::validate() const {
  if (!std::isfinite(v_min) || !std::isfinite(v_max) || !(v_min < v_max)) {
    throw Error(ErrorKind::Config, "calibration: require v_min < v_max");
  }
  if (!std::isfinite(in_lo) || !std::isfinite(in_hi) || !(in_lo < in_hi)) {
    throw Error(ErrorKind::Config, "calibration: require in_lo < in_hi");
  }
}

void FingerprintConfig::validate() const {
  if (segment_len < 1) throw Error(ErrorKind::Config, "fingerprint: segment_len must be >= 1");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw Error(ErrorKind::Config, "fingerprint: sample_rate must be positive");
  }
  device.validate();
}

double map_amplitude(const AmplitudeCalibration& cal, double sample) {
  if (!std::isfinite(sample)) {
    throw Error(ErrorKind::InvalidInput, "map_amplitude: non-finite sample");
  }
  const double u = cal.mode == AmplitudeMode::Absolute ? std::abs(sample) : sample;
  if (u <= cal.in_lo) return cal.v_min;
  if (u >= cal.in_hi) return cal.v_max;
  const double t = (u - cal.in_lo) / (cal.in_hi - cal.in_lo);
  return std::clamp(cal.v_min + t * (cal.v_max - cal.v_min), cal.v_min, cal.v_max);
}

namespace {

double percentile_of_sorted(const std::vector<double>& sorted, double pct) {
  const double rank = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

AmplitudeCalibration auto_calibrate(std::span<const double> signal, double lo_pct, double hi_pct,
                                    AmplitudeMode mode) {
  if (signal.size() < 100) {
    throw Error(ErrorKind::InvalidInput, "auto_calibrate: need at least 100 samples");
  }
  if (!(lo_pct >= 0.0) || !(hi_pct <= 100.0) || !(lo_pct < hi_pct)) {
    throw Error(ErrorKind::Config, "auto_calibrate: require 0 <= lo_pct < hi_pct <= 100");
  }
  std::vector<double> values;
  values.reserve(signal.size());
  for (double v : signal) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "auto_calibrate: non-finite sample");
    values.push_back(mode == AmplitudeMode::Absolute ? std::abs(v) : v);
  }
  std::sort(values.begin(), values.end());

  AmplitudeCalibration cal;
  cal.mode = mode;
  cal.in_lo = percentile_of_sorted(values, lo_pct);
  cal.in_hi = percentile_of_sorted(values, hi_pct);
  if (!(cal.in_lo < cal.in_hi)) {
    throw Error(ErrorKind::DegenerateCalibration,
                "auto_calibrate: percentiles coincide (" + std::to_string(cal.in_lo) + ")");
  }
  return cal;
}

double fingerprint_segment(const FingerprintConfig& cfg, const AmplitudeCalibration& cal,
                           std::span<const double> samples) {
  if (samples.size() != cfg.segment_len) {
    throw Error(ErrorKind::InvalidInput, "fingerprint_segment: expected " +
                                             std::to_string(cfg.segment_len) + " samples, got " +
                                             std::to_string(samples.size()));
  }
  ConductanceState state{cfg.device.g_on};
  for (double s : samples) {
    state = apply_pulse(state, cfg.device, map_amplitude(cal, s));
  }
  return cfg.device.g_on - state.g;
}

FingerprintMatrix fingerprint_clip(const FingerprintConfig& cfg,
                                   std::span<const AmplitudeCalibration> cals,
                                   std::span<const std::vector<double>> clip,
                                   std::span<const std::string> labels) {
  cfg.validate();
  if (clip.empty()) throw Error(ErrorKind::EmptyMatrix, "fingerprint_clip: no channels");
  if (cals.size() != clip.size()) {
    throw Error(ErrorKind::InvalidInput, "fingerprint_clip: need one calibration per channel");
  }
  if (!labels.empty() && labels.size() != clip.size()) {
    throw Error(ErrorKind::InvalidInput, "fingerprint_clip: need one label per channel");
  }
  const std::size_t n = clip.front().size();
  for (std::size_t c = 1; c < clip.size(); ++c) {
    if (clip[c].size() != n) {
      throw Error(ErrorKind::InvalidInput,
                  "fingerprint_clip: channel " + std::to_string(c) + " has " +
                      std::to_string(clip[c].size()) + " samples, expected " + std::to_string(n));
    }
  }
  for (const auto& cal : cals) cal.validate();
  if (n < cfg.segment_len) {
    throw Error(ErrorKind::EmptyMatrix, "fingerprint_clip: clip shorter than one segment");
  }

  FingerprintMatrix m;
  for (std::size_t c = 0; c < clip.size(); ++c) {
    m.row_labels.push_back(labels.empty() ? "ch" + std::to_string(c + 1) : labels[c]);
  }
  m.cols = n / cfg.segment_len;
  m.segment_duration = static_cast<double>(cfg.segment_len) / cfg.sample_rate;
  m.values.resize(m.rows() * m.cols);
  for (std::size_t c = 0; c < clip.size(); ++c) {
    const std::span<const double> channel(clip[c]);
    for (std::size_t col = 0; col < m.cols; ++col) {
      m.at(c, col) =
          fingerprint_segment(cfg, cals[c], channel.subspan(col * cfg.segment_len, cfg.segment_len));
    }
  }
  return m;
}

BandFingerprinter::BandFingerprinter(const FingerprintConfig& cfg,
                                     const std::array<AmplitudeCalibration, kNumBands>& cals)
    : cfg_(cfg), cals_(cals) {
  cfg_.validate();
  for (const auto& cal : cals_) cal.validate();
  for (auto& p : pending_) p.reserve(cfg_.segment_len);
  matrix_.row_labels.assign(kBandLabels.begin(), kBandLabels.end());
  matrix_.segment_duration = static_cast<double>(cfg_.segment_len) / cfg_.sample_rate;
}

std::optional<std::array<double, kNumBands>> BandFingerprinter::push(const MultiScaleFrame& frame) {
  const auto bands = frame.bands();
  for (std::size_t b = 0; b < kNumBands; ++b) pending_[b].push_back(bands[b]);
  if (pending_[0].size() < cfg_.segment_len) return std::nullopt;

  std::array<double, kNumBands> column{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    column[b] = fingerprint_segment(cfg_, cals_[b], pending_[b]);
    pending_[b].clear();
  }
  matrix_.values.insert(matrix_.values.end(), column.begin(), column.end());
  ++matrix_.cols;
  return column;
}

FingerprintMatrix fingerprint_bands(const FingerprintConfig& cfg,
                                    const std::array<AmplitudeCalibration, kNumBands>& cals,
                                    std::span<const MultiScaleFrame> frames) {
  BandFingerprinter fp(cfg, cals);
  if (frames.size() < cfg.segment_len) {
    throw Error(ErrorKind::EmptyMatrix, "fingerprint_bands: fewer frames than one segment");
  }
  for (const auto& f : frames) fp.push(f);
  return fp.matrix();
}

} // namespace memtransform

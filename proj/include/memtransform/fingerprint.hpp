#pragma once

#include "memtransform/device_model.hpp"
#include "memtransform/multiscale.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memtransform {

enum class AmplitudeMode { Absolute, Signed };

// Affine map from signal units to erase amplitude in volts, clamped to
// [v_min, v_max].
struct AmplitudeCalibration {
  double v_min = 1.3;
  double v_max = 1.8;
  double in_lo = 0.0;
  double in_hi = 1.0;
  AmplitudeMode mode = AmplitudeMode::Absolute;

  void validate() const;
};

struct FingerprintConfig {
  std::size_t segment_len = 15;
  double sample_rate = 400.0; // used only for the segment time axis
  MemristorParams device;

  void validate() const;
};

// Rows of channels or bands by columns of segments. Values are stored
// column-major so streaming producers can append whole columns.
struct FingerprintMatrix {
  std::vector<std::string> row_labels;
  std::size_t cols = 0;
  std::vector<double> values;
  double segment_duration = 0.0; // seconds per column

  std::size_t rows() const { return row_labels.size(); }
  bool empty() const { return values.empty(); }
  double at(std::size_t row, std::size_t col) const { return values[col * rows() + row]; }
  double& at(std::size_t row, std::size_t col) { return values[col * rows() + row]; }
};

inline const std::array<std::string, kNumBands> kBandLabels{"f10", "f21", "f32", "f43"};

double map_amplitude(const AmplitudeCalibration& cal, double sample);

// Sets in_lo/in_hi to the lo_pct/hi_pct percentiles (linear interpolation
// between order statistics) of |signal|, or of the signed values in Signed
// mode. Throws Error(DegenerateCalibration) when the two coincide.
AmplitudeCalibration auto_calibrate(std::span<const double> signal, double lo_pct = 1.0,
                                    double hi_pct = 99.0,
                                    AmplitudeMode mode = AmplitudeMode::Absolute);

double fingerprint_segment(const FingerprintConfig& cfg, const AmplitudeCalibration& cal,
                           std::span<const double> samples);

// One row per channel; trailing samples that do not fill a segment are dropped.
FingerprintMatrix fingerprint_clip(const FingerprintConfig& cfg,
                                   std::span<const AmplitudeCalibration> cals,
                                   std::span<const std::vector<double>> clip,
                                   std::span<const std::string> labels = {});

// Streaming band fingerprint: buffers frames and emits one column of four
// ΔG values every segment_len frames.
class BandFingerprinter {
 public:
  BandFingerprinter(const FingerprintConfig& cfg,
                    const std::array<AmplitudeCalibration, kNumBands>& cals);

  std::optional<std::array<double, kNumBands>> push(const MultiScaleFrame& frame);

  const FingerprintMatrix& matrix() const { return matrix_; }

 private:
  FingerprintConfig cfg_;
  std::array<AmplitudeCalibration, kNumBands> cals_;
  std::array<std::vector<double>, kNumBands> pending_;
  FingerprintMatrix matrix_;
};

FingerprintMatrix fingerprint_bands(const FingerprintConfig& cfg,
                                    const std::array<AmplitudeCalibration, kNumBands>& cals,
                                    std::span<const MultiScaleFrame> frames);

} // namespace memtransform

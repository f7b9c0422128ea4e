#pragma once

#include "memtransform/alert.hpp"
#include "memtransform/device_model.hpp"
#include "memtransform/error.hpp"
#include "memtransform/fingerprint.hpp"
#include "memtransform/multiscale.hpp"
#include "memtransform/signal_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memtransform::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitNumeric = 3,
};

enum class InputFormat { Csv, Raw };

enum class CalibrationMode { Auto, Explicit };

struct CalibrationSettings {
  CalibrationMode mode = CalibrationMode::Auto;
  double lo_pct = 1.0;
  double hi_pct = 99.0;
  AmplitudeMode amplitude = AmplitudeMode::Absolute;
  double v_min = 1.3;
  double v_max = 1.8;
  // Explicit mode only.
  double in_lo = 0.0;
  double in_hi = 1.0;
};

struct RunConfig {
  std::optional<std::filesystem::path> input;
  InputFormat format = InputFormat::Csv;
  std::optional<std::filesystem::path> sidecar; // raw input; defaults to <input>.json
  std::size_t downsample = 1;
  std::array<double, kNumScales> window_durations{10.0, 1.0, 0.1, 0.01};
  MemristorParams device;
  std::size_t segment_len = 15;
  CalibrationSettings calibration;
  EventDetectorConfig detector;
  AlertConfig alert;
  SynthConfig synth;
  std::filesystem::path out = ".";
  bool clip = false;

  void validate() const;
};

// Parses a JSON run configuration. Unknown keys are rejected with
// Error(Config); malformed JSON raises Error(Format).
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

int exit_code_for(ErrorKind kind);

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace memtransform::cli

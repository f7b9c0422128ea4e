#pragma once

#include "memtransform/fingerprint.hpp"
#include "memtransform/multiscale.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memtransform {

struct Recording {
  std::vector<std::string> channel_names;
  double sample_rate = 0.0;
  std::vector<std::vector<double>> samples; // [channel][sample]

  std::size_t num_channels() const { return samples.size(); }
  std::size_t num_samples() const { return samples.empty() ? 0 : samples.front().size(); }

  // Throws Error(InvalidInput) on ragged channels, a name/channel mismatch or
  // a non-positive sample rate.
  void validate() const;
};

// Header plus numeric columns; '#' lines before the header are collected as
// comments. Used for recordings and for erase-observation tables.
struct NumericTable {
  std::vector<std::string> comments; // text after '#', trimmed
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

NumericTable read_table_csv(const std::filesystem::path& path);

// CSV recording: optional leading '#' comment lines, one of which must be
// "# sample_rate=<Hz>", then a header of channel names, then one row per
// sample. Errors carry "path:line:column".
Recording read_csv(const std::filesystem::path& path);
void write_csv(const Recording& rec, const std::filesystem::path& path);

struct RawMeta {
  std::size_t channels = 1;
  double sample_rate = 0.0;
  std::string encoding = "f32le";
};

// Little-endian float32, channel-interleaved frames.
Recording read_raw(const std::filesystem::path& path, const RawMeta& meta);
void write_raw(const Recording& rec, const std::filesystem::path& path);

// JSON sidecar {"channels": n, "sample_rate": hz, "encoding": "f32le"}.
RawMeta read_raw_sidecar(const std::filesystem::path& path);
void write_raw_sidecar(const RawMeta& meta, const std::filesystem::path& path);

Recording downsample_mean(const Recording& rec, std::size_t factor);

enum class Regime { Interictal, Ictal, Mixed };

std::optional<Regime> parse_regime(std::string_view name);
const char* to_string(Regime regime);

struct SynthConfig {
  double duration = 60.0;
  double sample_rate = 400.0;
  Regime regime = Regime::Interictal;
  // Spacing of interictal events, or of ictal clusters. Unset means 15 s for
  // interictal and 5 s for ictal activity.
  std::optional<double> event_separation;
  double ictal_burst_rate = 4.0;
  double fast_oscillation = 80.0;
  double noise_amplitude = 0.05;
  std::uint64_t seed = 1;
  std::size_t channels = 1;

  void validate() const;
};

Recording synth(const SynthConfig& config);

// Shortest round-trip text for v using `digits` significant digits
// (printf "%.{digits}g" semantics, locale independent).
std::string format_number(double v, int digits);

void write_matrix_csv(const FingerprintMatrix& matrix, const std::filesystem::path& path);
FingerprintMatrix read_matrix_csv(const std::filesystem::path& path);

std::string encode_pgm(const FingerprintMatrix& matrix);
void write_pgm(const FingerprintMatrix& matrix, const std::filesystem::path& path);

// One row per frame: time, f0..f4, f10, f21, f32, f43.
void write_frames_csv(std::span<const MultiScaleFrame> frames, double sample_rate,
                      const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

} // namespace memtransform

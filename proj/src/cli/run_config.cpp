#include "memtransform/cli.hpp"
#include "memtransform/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <initializer_list>
#include <type_traits>

namespace memtransform::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& context) {
  if (!obj.is_object()) throw Error(ErrorKind::Config, context + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::Config, "unknown config key '" + context + "." + key + "'");
    }
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& target, const std::string& context) {
  if (!obj.contains(key)) return;
  if constexpr (std::is_unsigned_v<T>) {
    if (obj.at(key).is_number() && obj.at(key).template get<double>() < 0.0) {
      throw Error(ErrorKind::Config, "config key '" + context + "." + key + "' must be >= 0");
    }
  }
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::Config, "config key '" + context + "." + key + "' has the wrong type");
  }
}

void parse_input(const json& j, RunConfig& cfg) {
  check_keys(j, {"path", "format", "sidecar"}, "input");
  std::string path;
  read_into(j, "path", path, "input");
  if (!path.empty()) cfg.input = path;
  std::string format = "csv";
  read_into(j, "format", format, "input");
  if (format == "csv") cfg.format = InputFormat::Csv;
  else if (format == "raw") cfg.format = InputFormat::Raw;
  else throw Error(ErrorKind::Config, "input.format must be 'csv' or 'raw'");
  std::string sidecar;
  read_into(j, "sidecar", sidecar, "input");
  if (!sidecar.empty()) cfg.sidecar = sidecar;
}

void parse_device(const json& j, MemristorParams& d) {
  check_keys(j, {"A", "B", "K", "P", "g_on", "g_floor"}, "device");
  read_into(j, "A", d.a, "device");
  read_into(j, "B", d.b, "device");
  read_into(j, "K", d.k, "device");
  read_into(j, "P", d.p, "device");
  read_into(j, "g_on", d.g_on, "device");
  read_into(j, "g_floor", d.g_floor, "device");
}

AmplitudeMode parse_amplitude_mode(const std::string& s) {
  if (s == "absolute") return AmplitudeMode::Absolute;
  if (s == "signed") return AmplitudeMode::Signed;
  throw Error(ErrorKind::Config, "calibration.amplitude must be 'absolute' or 'signed'");
}

void parse_calibration(const json& j, CalibrationSettings& c) {
  const std::string ctx = "fingerprint.calibration";
  check_keys(j, {"mode", "lo_pct", "hi_pct", "amplitude", "v_min", "v_max", "in_lo", "in_hi"}, ctx);
  std::string mode = "auto";
  read_into(j, "mode", mode, ctx);
  if (mode == "auto") c.mode = CalibrationMode::Auto;
  else if (mode == "explicit") c.mode = CalibrationMode::Explicit;
  else throw Error(ErrorKind::Config, ctx + ".mode must be 'auto' or 'explicit'");
  read_into(j, "lo_pct", c.lo_pct, ctx);
  read_into(j, "hi_pct", c.hi_pct, ctx);
  std::string amplitude = "absolute";
  read_into(j, "amplitude", amplitude, ctx);
  c.amplitude = parse_amplitude_mode(amplitude);
  read_into(j, "v_min", c.v_min, ctx);
  read_into(j, "v_max", c.v_max, ctx);
  read_into(j, "in_lo", c.in_lo, ctx);
  read_into(j, "in_hi", c.in_hi, ctx);
  if (c.mode == CalibrationMode::Explicit && (!j.contains("in_lo") || !j.contains("in_hi"))) {
    throw Error(ErrorKind::Config, ctx + ": explicit mode needs in_lo and in_hi");
  }
}

void parse_detector(const json& j, EventDetectorConfig& d) {
  check_keys(j, {"enter_threshold", "exit_threshold", "min_duration", "noise_floor", "cycle_band"},
             "detector");
  read_into(j, "enter_threshold", d.enter_threshold, "detector");
  read_into(j, "exit_threshold", d.exit_threshold, "detector");
  read_into(j, "min_duration", d.min_duration, "detector");
  read_into(j, "noise_floor", d.noise_floor, "detector");
  std::string band = "f32";
  read_into(j, "cycle_band", band, "detector");
  if (band == "f32") d.cycle_band = CycleBand::F32;
  else if (band == "f43") d.cycle_band = CycleBand::F43;
  else throw Error(ErrorKind::Config, "detector.cycle_band must be 'f32' or 'f43'");
}

void parse_alert(const json& j, AlertConfig& a) {
  check_keys(j, {"tau", "w_sep", "w_fast", "w_width", "sep_ref", "fast_ref", "width_ref", "cap"},
             "alert");
  read_into(j, "tau", a.tau, "alert");
  read_into(j, "w_sep", a.w_sep, "alert");
  read_into(j, "w_fast", a.w_fast, "alert");
  read_into(j, "w_width", a.w_width, "alert");
  read_into(j, "sep_ref", a.sep_ref, "alert");
  read_into(j, "fast_ref", a.fast_ref, "alert");
  read_into(j, "width_ref", a.width_ref, "alert");
  read_into(j, "cap", a.cap, "alert");
}

void parse_synth(const json& j, SynthConfig& s) {
  check_keys(j, {"duration", "sample_rate", "regime", "event_separation", "ictal_burst_rate",
                 "fast_oscillation", "noise_amplitude", "seed", "channels"},
             "synth");
  read_into(j, "duration", s.duration, "synth");
  read_into(j, "sample_rate", s.sample_rate, "synth");
  if (j.contains("regime")) {
    std::string regime;
    read_into(j, "regime", regime, "synth");
    const auto r = parse_regime(regime);
    if (!r) throw Error(ErrorKind::Config, "synth.regime must be interictal, ictal or mixed");
    s.regime = *r;
  }
  if (j.contains("event_separation")) {
    double sep = 0.0;
    read_into(j, "event_separation", sep, "synth");
    s.event_separation = sep;
  }
  read_into(j, "ictal_burst_rate", s.ictal_burst_rate, "synth");
  read_into(j, "fast_oscillation", s.fast_oscillation, "synth");
  read_into(j, "noise_amplitude", s.noise_amplitude, "synth");
  read_into(j, "seed", s.seed, "synth");
  read_into(j, "channels", s.channels, "synth");
}

} // namespace

void RunConfig::validate() const {
  if (downsample < 1) throw Error(ErrorKind::Config, "downsample must be >= 1");
  device.validate();
  if (segment_len < 1) throw Error(ErrorKind::Config, "fingerprint.segment_len must be >= 1");
  const auto& c = calibration;
  if (!(c.v_min < c.v_max)) throw Error(ErrorKind::Config, "calibration: v_min must be below v_max");
  if (c.mode == CalibrationMode::Auto && !(c.lo_pct >= 0.0 && c.lo_pct < c.hi_pct && c.hi_pct <= 100.0)) {
    throw Error(ErrorKind::Config, "calibration: require 0 <= lo_pct < hi_pct <= 100");
  }
  if (c.mode == CalibrationMode::Explicit && !(c.in_lo < c.in_hi)) {
    throw Error(ErrorKind::Config, "calibration: in_lo must be below in_hi");
  }
  detector.validate();
  alert.validate();
  synth.validate();
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Format, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  check_keys(j, {"input", "downsample", "scales", "device", "fingerprint", "detector", "alert",
                 "synth", "out", "clip"},
             "config");
  if (j.contains("input")) parse_input(j["input"], cfg);
  read_into(j, "downsample", cfg.downsample, "config");
  if (j.contains("scales")) {
    check_keys(j["scales"], {"durations"}, "scales");
    read_into(j["scales"], "durations", cfg.window_durations, "scales");
  }
  if (j.contains("device")) parse_device(j["device"], cfg.device);
  if (j.contains("fingerprint")) {
    const auto& fp = j["fingerprint"];
    check_keys(fp, {"segment_len", "calibration"}, "fingerprint");
    read_into(fp, "segment_len", cfg.segment_len, "fingerprint");
    if (fp.contains("calibration")) parse_calibration(fp["calibration"], cfg.calibration);
  }
  if (j.contains("detector")) parse_detector(j["detector"], cfg.detector);
  if (j.contains("alert")) parse_alert(j["alert"], cfg.alert);
  if (j.contains("synth")) parse_synth(j["synth"], cfg.synth);
  std::string out;
  read_into(j, "out", out, "config");
  if (!out.empty()) cfg.out = out;
  read_into(j, "clip", cfg.clip, "config");
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path));
}

} // namespace memtransform::cli

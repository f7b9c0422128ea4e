#include "memtransform/cli.hpp"
#include "memtransform/error.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <filesystem>
#include <ostream>

namespace memtransform::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Format:
    case ErrorKind::Io:
    case ErrorKind::EmptyMatrix:
      return kExitInput;
    case ErrorKind::Range:
    case ErrorKind::Singularity:
    case ErrorKind::FitDegenerate:
    case ErrorKind::Config:
    case ErrorKind::DegenerateCalibration:
      return kExitNumeric;
  }
  return kExitNumeric;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string file_stem_for(const std::string& channel) {
  std::string s;
  for (char c : channel) {
    s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  }
  return s.empty() ? "channel" : s;
}

Recording load_input(const RunConfig& cfg) {
  if (!cfg.input) throw UsageError("an input recording is required (--input or input.path)");
  Recording rec;
  if (cfg.format == InputFormat::Csv) {
    rec = read_csv(*cfg.input);
  } else {
    fs::path sidecar = cfg.sidecar.value_or(fs::path(cfg.input->string() + ".json"));
    rec = read_raw(*cfg.input, read_raw_sidecar(sidecar));
  }
  rec.validate();
  if (cfg.downsample > 1) rec = downsample_mean(rec, cfg.downsample);
  if (rec.num_channels() == 0) throw Error(ErrorKind::Format, "recording has no channels");
  return rec;
}

ScaleBank scale_bank(const RunConfig& cfg, double sample_rate) {
  ScaleBank bank;
  bank.sample_rate = sample_rate;
  bank.window_durations = cfg.window_durations;
  return bank;
}

// A constant band (e.g. f10 before the 1 s window has filled) has no spread to
// calibrate against; it falls back to the explicit range with a warning.
AmplitudeCalibration calibrate(const CalibrationSettings& s, std::span<const double> values,
                               const std::string& what, std::ostream& err) {
  AmplitudeCalibration cal;
  if (s.mode == CalibrationMode::Auto) {
    try {
      cal = auto_calibrate(values, s.lo_pct, s.hi_pct, s.amplitude);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateCalibration) throw;
      err << "warning: " << what << ": " << e.what() << "; using in_lo=" << format_number(s.in_lo, 9)
          << " in_hi=" << format_number(s.in_hi, 9) << "\n";
      cal.in_lo = s.in_lo;
      cal.in_hi = s.in_hi;
      cal.mode = s.amplitude;
    }
  } else {
    cal.in_lo = s.in_lo;
    cal.in_hi = s.in_hi;
    cal.mode = s.amplitude;
  }
  cal.v_min = s.v_min;
  cal.v_max = s.v_max;
  cal.validate();
  return cal;
}

FingerprintConfig fingerprint_config(const RunConfig& cfg, double sample_rate) {
  FingerprintConfig fc;
  fc.segment_len = cfg.segment_len;
  fc.sample_rate = sample_rate;
  fc.device = cfg.device;
  return fc;
}

void cmd_bands(const RunConfig& cfg, std::ostream& out) {
  const auto rec = load_input(cfg);
  const auto bank = scale_bank(cfg, rec.sample_rate);
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    const auto frames = process(bank, rec.samples[c]);
    const auto path = cfg.out / (file_stem_for(rec.channel_names[c]) + "_bands.csv");
    write_frames_csv(frames, rec.sample_rate, path);
    out << "wrote " << path.string() << " (" << frames.size() << " frames)\n";
  }
}

void write_matrix_files(const FingerprintMatrix& m, const fs::path& base, std::ostream& out) {
  fs::path csv = base;
  csv += ".csv";
  fs::path pgm = base;
  pgm += ".pgm";
  write_matrix_csv(m, csv);
  write_pgm(m, pgm);
  out << "wrote " << csv.string() << " and " << pgm.string() << " (" << m.rows() << "x" << m.cols
      << ")\n";
}

void cmd_fingerprint(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto rec = load_input(cfg);
  const auto fc = fingerprint_config(cfg, rec.sample_rate);
  if (cfg.clip) {
    std::vector<AmplitudeCalibration> cals;
    for (std::size_t c = 0; c < rec.num_channels(); ++c) {
      cals.push_back(calibrate(cfg.calibration, rec.samples[c], rec.channel_names[c], err));
    }
    const auto m = fingerprint_clip(fc, cals, rec.samples, rec.channel_names);
    write_matrix_files(m, cfg.out / "clip_fingerprint", out);
    return;
  }
  const auto bank = scale_bank(cfg, rec.sample_rate);
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    const auto frames = process(bank, rec.samples[c]);
    std::array<AmplitudeCalibration, kNumBands> cals;
    std::vector<double> band(frames.size());
    for (std::size_t b = 0; b < kNumBands; ++b) {
      for (std::size_t i = 0; i < frames.size(); ++i) band[i] = frames[i].bands()[b];
      cals[b] = calibrate(cfg.calibration, band, rec.channel_names[c] + " " + kBandLabels[b], err);
    }
    const auto m = fingerprint_bands(fc, cals, frames);
    write_matrix_files(m, cfg.out / (file_stem_for(rec.channel_names[c]) + "_fingerprint"), out);
  }
}

void cmd_alert(const RunConfig& cfg, std::ostream& out) {
  const auto rec = load_input(cfg);
  const auto bank = scale_bank(cfg, rec.sample_rate);
  for (std::size_t c = 0; c < rec.num_channels(); ++c) {
    const auto frames = process(bank, rec.samples[c]);
    const auto run = run_alert(frames, rec.sample_rate, cfg.detector, cfg.alert);
    std::string text = "time,f10,alert_level,event\n";
    for (const auto& s : run.samples) {
      text += format_number(s.time, 9) + ',' + format_number(s.f10, 9) + ',' +
              format_number(s.level, 9) + ',';
      if (s.event_onset) text += "onset";
      else if (s.event_end) text += "end";
      text += '\n';
    }
    const auto path = cfg.out / (file_stem_for(rec.channel_names[c]) + "_alert.csv");
    write_file_atomic(path, text);
    out << rec.channel_names[c] << ": events=" << run.events.size()
        << " peak_alert=" << format_number(run.peak_level, 9) << "\n";
  }
}

void cmd_fit(const fs::path& path, std::ostream& out) {
  const auto table = read_table_csv(path);
  auto column = [&](const char* name) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), name);
    if (it == table.columns.end()) {
      throw Error(ErrorKind::Format, path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - table.columns.begin());
  };
  const std::size_t cx = column("x");
  const std::size_t cg = column("g_before");
  const std::size_t cd = column("delta_g");
  if (table.rows.empty()) throw Error(ErrorKind::Format, path.string() + ": no observations");

  std::vector<EraseObservation> obs;
  obs.reserve(table.rows.size());
  for (const auto& row : table.rows) obs.push_back({row[cx], row[cg], row[cd]});
  const auto fit = fit_erase_model(obs);
  out << "A=" << format_number(fit.params.a, 10) << "\n"
      << "B=" << format_number(fit.params.b, 10) << "\n"
      << "K=" << format_number(fit.params.k, 10) << "\n"
      << "P=" << format_number(fit.params.p, 10) << "\n"
      << "rms_log_residual=" << format_number(fit.rms_log_residual, 6) << "\n"
      << "observations=" << fit.observations << "\n";
}

void cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto rec = synth(cfg.synth);
  if (cfg.format == InputFormat::Csv) {
    const auto path = cfg.out / "synth.csv";
    write_csv(rec, path);
    out << "wrote " << path.string() << " (" << rec.num_samples() << " samples)\n";
  } else {
    const auto path = cfg.out / "synth.f32";
    write_raw(rec, path);
    write_raw_sidecar({rec.num_channels(), rec.sample_rate, "f32le"}, cfg.out / "synth.f32.json");
    out << "wrote " << path.string() << " (" << rec.num_samples() << " samples)\n";
  }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Memristor-transform fingerprints and alert levels for multichannel recordings",
               "memtransform"};
  app.require_subcommand(1);

  std::string config_path;
  std::string input;
  std::string format;
  std::string out_dir;
  std::size_t downsample = 0;
  std::uint64_t seed = 0;
  bool clip = false;
  std::string regime;
  double duration = 0.0;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--input", input, "Input recording (or observation table for fit)");
  app.add_option("--format", format, "Input/output recording format")->check(CLI::IsMember({"csv", "raw"}));
  app.add_option("--downsample", downsample, "Block-mean decimation factor")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Synthesizer seed");
  app.add_flag("--clip", clip, "Fingerprint whole clips (channels x segments)");
  app.fallthrough();

  auto* bands = app.add_subcommand("bands", "Write the multi-scale averages and bands per channel");
  auto* fingerprint = app.add_subcommand("fingerprint", "Write band (or clip) fingerprint matrices");
  auto* alert = app.add_subcommand("alert", "Detect events and write the alert-level signal");
  auto* fit = app.add_subcommand("fit", "Fit device constants to an erase observation table");
  std::string observations;
  fit->add_option("observations", observations, "CSV with columns x,g_before,delta_g");
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic recording");
  synth_cmd->add_option("--regime", regime, "interictal, ictal or mixed")
      ->check(CLI::IsMember({"interictal", "ictal", "mixed"}));
  synth_cmd->add_option("--duration", duration, "Seconds")->check(CLI::PositiveNumber);
  for (auto* sub : {bands, fingerprint, alert, fit, synth_cmd}) sub->fallthrough();

  std::vector<std::string> argv_store{"memtransform"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!input.empty()) cfg.input = input;
    if (format == "csv") cfg.format = InputFormat::Csv;
    if (format == "raw") cfg.format = InputFormat::Raw;
    if (downsample > 0) cfg.downsample = downsample;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (app.count("--seed") > 0) cfg.synth.seed = seed;
    if (clip) cfg.clip = true;
    if (!regime.empty()) cfg.synth.regime = *parse_regime(regime);
    if (duration > 0.0) cfg.synth.duration = duration;
    cfg.validate();

    if (*bands) cmd_bands(cfg, out);
    else if (*fingerprint) cmd_fingerprint(cfg, out, err);
    else if (*alert) cmd_alert(cfg, out);
    else if (*synth_cmd) cmd_synth(cfg, out);
    else if (*fit) {
      const fs::path path = !observations.empty() ? fs::path(observations)
                            : cfg.input             ? *cfg.input
                                                    : throw UsageError("fit needs an observation table");
      cmd_fit(path, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (I/O): " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

} // namespace memtransform::cli

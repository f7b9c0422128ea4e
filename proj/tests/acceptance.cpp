// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// `acceptance --regen <dir>` rewrites the golden files instead.

#include "memtransform/alert.hpp"
#include "memtransform/device_model.hpp"
#include "memtransform/fingerprint.hpp"
#include "memtransform/multiscale.hpp"
#include "memtransform/signal_io.hpp"

#include "golden_cases.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace memtransform;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void pulse_trajectories(Outcome& o) {
  const auto start = Clock::now();
  const MemristorParams p;
  double worst = 0.0;
  double prev_final = INFINITY;
  for (double x : {1.3, 1.4, 1.5, 1.6, 1.7, 1.8}) {
    const std::vector<double> xs(15, x);
    const auto traj = apply_pulse_train(p.g_on, p, xs);
    const auto want = oracle::constant_train(10.0, x, 15);
    o.require(traj.size() == 16, "trajectory length");
    for (std::size_t i = 0; i < traj.size(); ++i) {
      worst = std::max(worst, oracle::rel_err(traj[i], want[i]));
      if (i > 0) o.require(traj[i] <= traj[i - 1], "trajectory increased");
    }
    o.require(traj.back() < prev_final, "final conductance not decreasing in amplitude");
    prev_final = traj.back();
  }
  const double t = seconds_since(start);
  o.require(worst <= 1e-12, "oracle mismatch");
  o.require(t < 1.0, "too slow");
  o.detail << (o.pass ? "" : "; ") << "max rel err " << worst << ", " << t << " s";
}

void clip_shape(Outcome& o) {
  const auto start = Clock::now();
  std::vector<std::vector<double>> clip;
  for (int c = 0; c < 16; ++c) clip.push_back(oracle::uniform_signal(960, 500 + c));
  std::vector<AmplitudeCalibration> cals;
  for (const auto& ch : clip) cals.push_back(auto_calibrate(ch));
  const auto m = fingerprint_clip(FingerprintConfig{}, cals, clip);
  const double t = seconds_since(start);
  o.require(m.rows() == 16 && m.cols == 64 && m.values.size() == 1024, "shape");
  for (double v : m.values) o.require(v >= 0.0 && v <= 10.0, "cell out of range");
  o.require(t < 1.0, "too slow");
  o.detail << (o.pass ? "" : "; ") << m.rows() << "x" << m.cols << ", " << t << " s";
}

void running_average(Outcome& o) {
  const auto x = oracle::uniform_signal(10000, 2718);
  const auto frames = process(ScaleBank{}, x);
  const std::array<std::size_t, 4> w{4000, 400, 40, 4};
  double worst_rel = 0.0, worst_tel = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const auto& f = frames[n];
    const std::array<double, 5> got{f.f0, f.f1, f.f2, f.f3, f.f4};
    for (std::size_t i = 0; i < 5; ++i) {
      const double want = i < 4 ? oracle::trailing_mean(x, n, w[i]) : x[n];
      worst_rel = std::max(worst_rel, std::abs(got[i] - want) / std::max(std::abs(want), 1e-6));
    }
    worst_tel = std::max(worst_tel, std::abs(f.f10 + f.f21 + f.f32 + f.f43 - (f.f4 - f.f0)));
  }
  o.require(worst_rel <= 1e-9, "trailing mean mismatch");
  o.require(worst_tel <= 1e-12, "telescoping identity");
  o.detail << (o.pass ? "" : "; ") << "max rel err " << worst_rel << ", max telescoping err "
           << worst_tel;
}

void band_selectivity(Outcome& o) {
  std::vector<double> x(8000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * 5.0 * static_cast<double>(i) / 400.0);
  }
  const auto frames = process(ScaleBank{}, x);
  std::vector<double> f10, f21, f43;
  // Skip the first slow window so every average is over a full window.
  for (std::size_t i = 4000; i < frames.size(); ++i) {
    f10.push_back(frames[i].f10);
    f21.push_back(frames[i].f21);
    f43.push_back(frames[i].f43);
  }
  const double r10 = oracle::rms(f10), r21 = oracle::rms(f21), r43 = oracle::rms(f43);
  o.require(r21 >= 3.0 * r10 && r21 >= 3.0 * r43, "f21 not dominant");
  o.detail << (o.pass ? "" : "; ") << "RMS f10 " << r10 << ", f21 " << r21 << ", f43 " << r43;
}

void fit_round_trip(Outcome& o) {
  const auto start = Clock::now();
  const MemristorParams truth;
  std::vector<EraseObservation> clean;
  for (int i = 0; i < 6; ++i) {
    for (int g = 1; g <= 10; ++g) {
      const double x = 1.3 + 0.1 * i;
      clean.push_back({x, double(g), delta_g(truth, g, x)});
    }
  }
  auto noisy = clean;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (auto& ob : noisy) ob.delta_g *= 1.0 + noise(rng);

  const auto worst_err = [&](const MemristorParams& f) {
    return std::max({oracle::rel_err(f.a, truth.a), oracle::rel_err(f.b, truth.b),
                     oracle::rel_err(f.p, truth.p),
                     oracle::rel_err(std::log(f.k), std::log(truth.k))});
  };
  const double e_clean = worst_err(fit_params(clean));
  const double e_noisy = worst_err(fit_params(noisy));
  const double t = seconds_since(start);
  o.require(e_clean <= 1e-6, "noise-free fit");
  o.require(e_noisy <= 0.05, "noisy fit");
  o.require(t < 1.0, "too slow");
  o.detail << (o.pass ? "" : "; ") << "clean " << e_clean << ", 1% noise " << e_noisy << ", " << t
           << " s";
}

void alert_decay(Outcome& o) {
  const AlertConfig cfg;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double level0 = cfg.cap * u(rng);
    const double halvings = 1 + rng() % 5;
    const double total = halvings * cfg.tau * std::numbers::ln2;
    std::vector<double> cuts(rng() % 50);
    for (auto& c : cuts) c = total * u(rng);
    std::sort(cuts.begin(), cuts.end());
    AlertState s{level0, 0.0};
    for (double c : cuts) s = alert_step(s, c, std::nullopt, cfg);
    s = alert_step(s, total, std::nullopt, cfg);
    worst = std::max(worst, oracle::rel_err(s.level, level0 / std::exp2(halvings)));
  }
  o.require(worst <= 1e-9, "decay law");
  o.detail << (o.pass ? "" : "; ") << "max rel err " << worst << " over 1000 splits";
}

void regime_separation(Outcome& o) {
  const auto start = Clock::now();
  const EventDetectorConfig dcfg;
  const AlertConfig acfg;
  const auto analyse = [&](SynthConfig sc) {
    const auto rec = synth(sc);
    const auto frames = process(ScaleBank{}, rec.samples[0]);
    return run_alert(frames, rec.sample_rate, dcfg, acfg);
  };
  SynthConfig inter;
  inter.regime = Regime::Interictal;
  inter.event_separation = 20.0;
  inter.seed = 1;
  SynthConfig ictal;
  ictal.regime = Regime::Ictal;
  ictal.seed = 1;
  const auto ri = analyse(inter);
  const auto rc = analyse(ictal);
  const double t = seconds_since(start);

  std::size_t inter_max = 0, ictal_min = SIZE_MAX;
  for (const auto& e : ri.events) inter_max = std::max(inter_max, e.fast_cycles);
  for (const auto& e : rc.events) ictal_min = std::min(ictal_min, e.fast_cycles);
  o.require(!ri.events.empty() && !rc.events.empty(), "no events detected");
  o.require(rc.peak_level >= 2.0 * ri.peak_level, "peak ratio below 2");
  o.require(ictal_min >= 2, "ictal event with fewer than 2 fast cycles");
  o.require(inter_max <= 1, "interictal event with more than 1 fast cycle");
  o.require(t < 10.0, "too slow");
  o.detail << (o.pass ? "" : "; ") << "peaks " << ri.peak_level << " vs " << rc.peak_level
           << ", events " << ri.events.size() << " vs " << rc.events.size()
           << ", cycles interictal<=" << inter_max << " ictal>=" << ictal_min << ", " << t << " s";
}

void downsampling(Outcome& o) {
  Recording rec;
  rec.sample_rate = 20000.0;
  rec.channel_names = {"a", "b"};
  rec.samples = {oracle::uniform_signal(200000, 1, -1.0, 1.0), oracle::uniform_signal(200000, 2, 5.0, 9.0)};
  const auto out = downsample_mean(rec, 50);
  o.require(out.sample_rate == 400.0, "sample rate");
  double worst = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto want = oracle::block_mean(rec.samples[c], 50);
    o.require(out.samples[c].size() == want.size(), "length");
    for (std::size_t i = 0; i < want.size(); ++i) {
      worst = std::max(worst, std::abs(out.samples[c][i] - want[i]) / std::max(std::abs(want[i]), 1e-6));
    }
  }
  o.require(worst <= 1e-12, "block mean mismatch");
  o.detail << (o.pass ? "" : "; ") << "max rel err " << worst;
}

void golden_files(Outcome& o) {
  const auto work = std::filesystem::temp_directory_path() /
                    ("memtransform-acceptance-" + std::to_string(std::random_device{}()));
  std::size_t files = 0;
  for (const auto& c : golden::cases()) {
    const auto dir = work / c.name;
    const auto err = golden::run_case(c, dir);
    o.require(err.empty(), c.name + ": " + err);
    if (!err.empty()) continue;
    for (const auto& name : c.outputs) {
      const auto want_path = std::filesystem::path(MEMTRANSFORM_GOLDEN_DIR) / c.name / name;
      const bool same = std::filesystem::exists(want_path) && read_file(dir / name) == read_file(want_path);
      o.require(same, c.name + "/" + name + " differs");
      ++files;
    }
  }
  std::filesystem::remove_all(work);
  o.detail << (o.pass ? "" : "; ") << files << " files compared";
}

int regenerate(const std::filesystem::path& target) {
  for (const auto& c : golden::cases()) {
    const auto work = target / (c.name + ".work");
    if (const auto err = golden::run_case(c, work); !err.empty()) {
      std::cerr << c.name << ": " << err << "\n";
      return 1;
    }
    std::filesystem::create_directories(target / c.name);
    for (const auto& name : c.outputs) {
      std::filesystem::copy_file(work / name, target / c.name / name,
                                 std::filesystem::copy_options::overwrite_existing);
      std::cout << "wrote " << (target / c.name / name).string() << "\n";
    }
    std::filesystem::remove_all(work);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::string(argv[1]) == "--regen") return regenerate(argv[2]);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"pulse trajectories (6 amplitudes x 15 pulses)", pulse_trajectories},
      {"clip fingerprint shape 16x64", clip_shape},
      {"running-average oracle and telescoping", running_average},
      {"band selectivity at 5 Hz", band_selectivity},
      {"erase-law fit round trip", fit_round_trip},
      {"alert decay law", alert_decay},
      {"interictal vs ictal separation", regime_separation},
      {"downsampling 20 kHz -> 400 Hz", downsampling},
      {"golden CSV/PGM outputs", golden_files},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail.str() << ")\n";
    failures += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}

#include "memtransform/error.hpp"
#include "memtransform/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace memtransform {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Interictal discharge: slow monophasic wave with one sharp biphasic spike
// near its crest.
constexpr double kSlowWaveDuration = 1.0;
constexpr double kSlowWaveAmplitude = 1.0;
constexpr double kSpikeDuration = 0.05;
constexpr double kSpikeAmplitude = 2.0;
constexpr double kSpikeOffset = 0.6;

// Ictal cluster: sustained envelope carrying a spike train and fast ripples.
constexpr double kClusterDuration = 3.0;
constexpr double kClusterAmplitude = 1.5;
constexpr double kRippleAmplitude = 0.8;
constexpr double kFirstSpikeOffset = 0.1;
constexpr int kPolyspikeCycles = 3;
constexpr double kPolyspikeAmplitude = 3.0;

constexpr double kMixedBlock = 30.0;

// Standard normal deviates from raw mt19937_64 output. std::normal_distribution
// is implementation-defined, which would make fixed-seed files differ between
// standard libraries.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double operator()() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

class Canvas {
 public:
  Canvas(std::vector<double>& data, double rate) : data_(data), rate_(rate) {}

  // Adds shape(tau) for tau in [0, length) starting at time `start`.
  template <typename Shape>
  void add(double start, double length, Shape shape) {
    const auto first = static_cast<long long>(std::llround(start * rate_));
    const auto count = static_cast<long long>(std::llround(length * rate_));
    for (long long k = 0; k < count; ++k) {
      const long long i = first + k;
      if (i < 0 || i >= static_cast<long long>(data_.size())) continue;
      data_[static_cast<std::size_t>(i)] += shape(static_cast<double>(k) / rate_, count, k);
    }
  }

 private:
  std::vector<double>& data_;
  double rate_;
};

double hann(long long k, long long n) {
  return 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
}

// `cycles` back-to-back periods of the spike waveform.
void add_spike(Canvas& canvas, double start, double amplitude, int cycles = 1) {
  canvas.add(start, cycles * kSpikeDuration, [amplitude, cycles](double, long long n, long long k) {
    return amplitude * std::sin(kTwoPi * cycles * static_cast<double>(k) / static_cast<double>(n));
  });
}

void interictal_block(Canvas& canvas, double begin, double end, double separation, Gaussian& rng) {
  for (double t = begin + separation / 2.0; t + kSlowWaveDuration + 0.5 <= end; t += separation) {
    const double onset = t + 0.25 * (2.0 * rng.uniform() - 1.0);
    const double gain = 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
    canvas.add(onset, kSlowWaveDuration, [gain](double, long long n, long long k) {
      return gain * kSlowWaveAmplitude * hann(k, n);
    });
    add_spike(canvas, onset + kSpikeOffset, gain * kSpikeAmplitude);
  }
}

void ictal_block(Canvas& canvas, double begin, double end, double separation,
                 const SynthConfig& cfg, Gaussian& rng) {
  for (double t = begin + 1.0; t + kClusterDuration <= end; t += separation) {
    const double gain = 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
    const double fast = cfg.fast_oscillation;
    canvas.add(t, kClusterDuration, [gain, fast](double tau, long long n, long long k) {
      const double env = hann(k, n);
      return gain * env * (kClusterAmplitude + kRippleAmplitude * std::sin(kTwoPi * fast * tau));
    });
    const double burst = kPolyspikeCycles * kSpikeDuration;
    for (double s = kFirstSpikeOffset; s + burst < kClusterDuration; s += 1.0 / cfg.ictal_burst_rate) {
      add_spike(canvas, t + s, gain * kPolyspikeAmplitude, kPolyspikeCycles);
    }
  }
}

} // namespace

std::optional<Regime> parse_regime(std::string_view name) {
  if (name == "interictal") return Regime::Interictal;
  if (name == "ictal") return Regime::Ictal;
  if (name == "mixed") return Regime::Mixed;
  return std::nullopt;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Interictal: return "interictal";
    case Regime::Ictal: return "ictal";
    case Regime::Mixed: return "mixed";
  }
  return "?";
}

void SynthConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(duration)) throw Error(ErrorKind::Config, "synth: duration must be positive");
  if (!positive(sample_rate)) throw Error(ErrorKind::Config, "synth: sample_rate must be positive");
  if (event_separation && !positive(*event_separation)) {
    throw Error(ErrorKind::Config, "synth: event_separation must be positive");
  }
  if (!positive(ictal_burst_rate) || !positive(fast_oscillation)) {
    throw Error(ErrorKind::Config, "synth: rates must be positive");
  }
  if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude)) {
    throw Error(ErrorKind::Config, "synth: noise_amplitude must be >= 0");
  }
  if (channels < 1) throw Error(ErrorKind::Config, "synth: channels must be >= 1");
}

Recording synth(const SynthConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(std::llround(config.duration * config.sample_rate));
  const double interictal_sep = config.event_separation.value_or(15.0);
  const double ictal_sep = config.event_separation.value_or(5.0);

  Recording rec;
  rec.sample_rate = config.sample_rate;
  for (std::size_t c = 0; c < config.channels; ++c) {
    Gaussian rng(config.seed + 0x9E3779B97F4A7C15ull * c);
    std::vector<double> data(n, 0.0);
    Canvas canvas(data, config.sample_rate);
    switch (config.regime) {
      case Regime::Interictal:
        interictal_block(canvas, 0.0, config.duration, interictal_sep, rng);
        break;
      case Regime::Ictal:
        ictal_block(canvas, 0.0, config.duration, ictal_sep, config, rng);
        break;
      case Regime::Mixed:
        for (std::size_t block = 0; static_cast<double>(block) * kMixedBlock < config.duration; ++block) {
          const double b = static_cast<double>(block) * kMixedBlock;
          const double end = std::min(b + kMixedBlock, config.duration);
          if (block % 2 == 0) {
            interictal_block(canvas, b, end, interictal_sep, rng);
          } else {
            ictal_block(canvas, b, end, ictal_sep, config, rng);
          }
        }
        break;
    }
    if (config.noise_amplitude > 0.0) {
      for (auto& v : data) v += config.noise_amplitude * rng();
    }
    rec.channel_names.push_back("ch" + std::to_string(c + 1));
    rec.samples.push_back(std::move(data));
  }
  return rec;
}

} // namespace memtransform

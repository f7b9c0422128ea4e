#pragma once

// Brute-force reference computations used only by tests. Nothing here calls
// into the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Erase law evaluated literally with the default constants.
inline double erase_step(double g, double x, double a = 7.0, double b = 16.1, double k = 6.31e-30,
                         double p = 32.24, double floor = 0.0) {
  const double dg = -k * std::exp(p * x) * std::pow(g, -a * x + b);
  const double next = g + dg;
  return next < floor ? floor : next;
}

inline std::vector<double> constant_train(double g0, double x, int pulses) {
  std::vector<double> traj{g0};
  for (int i = 0; i < pulses; ++i) traj.push_back(erase_step(traj.back(), x));
  return traj;
}

// Mean of signal[max(0, i+1-w) .. i].
inline double trailing_mean(const std::vector<double>& signal, std::size_t i, std::size_t w) {
  const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
  double s = 0.0;
  for (std::size_t j = lo; j <= i; ++j) s += signal[j];
  return s / static_cast<double>(i + 1 - lo);
}

inline std::vector<double> block_mean(const std::vector<double>& x, std::size_t factor) {
  std::vector<double> out;
  for (std::size_t start = 0; start + factor <= x.size(); start += factor) {
    long double s = 0.0L;
    for (std::size_t j = start; j < start + factor; ++j) s += x[j];
    out.push_back(static_cast<double>(s / static_cast<long double>(factor)));
  }
  return out;
}

// Nearest-rank percentile of a copy of the data.
inline double nearest_rank_percentile(std::vector<double> v, double pct) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

inline std::vector<double> uniform_signal(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                          double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline std::vector<double> normal_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline double rms(const std::vector<double>& v, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i] * v[i];
  return std::sqrt(s / static_cast<double>(v.size() - from));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

} // namespace oracle

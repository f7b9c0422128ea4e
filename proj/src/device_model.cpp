#include "memtransform/device_model.hpp"

#include "memtransform/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace memtransform {

namespace {

void require_finite_amplitude(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::InvalidInput, "erase amplitude must be finite");
  }
}

} // namespace

void MemristorParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, "device params: " + msg); };
  if (!(a > 0.0) || !std::isfinite(a)) fail("A must be positive");
  if (!std::isfinite(b)) fail("B must be finite");
  if (!(k > 0.0) || !std::isfinite(k)) fail("K must be positive");
  if (!(p > 0.0) || !std::isfinite(p)) fail("P must be positive");
  if (!(g_floor >= 0.0) || !std::isfinite(g_floor)) fail("g_floor must be >= 0");
  if (!(g_on > g_floor) || !std::isfinite(g_on)) fail("g_on must exceed g_floor");
}

double gamma_of(const MemristorParams& params, double x) {
  require_finite_amplitude(x);
  return -params.a * x + params.b;
}

double alpha_of(const MemristorParams& params, double x) {
  require_finite_amplitude(x);
  const double magnitude = params.k * std::exp(params.p * x);
  if (!std::isfinite(magnitude)) {
    throw Error(ErrorKind::Range, "alpha(x) overflows at x = " + std::to_string(x));
  }
  return -magnitude;
}

double delta_g(const MemristorParams& params, double g, double x) {
  if (!(g >= 0.0) || !std::isfinite(g)) {
    throw Error(ErrorKind::InvalidInput, "conductance must be finite and >= 0");
  }
  const double gamma = gamma_of(params, x);
  const double alpha = alpha_of(params, x);
  if (g == 0.0) {
    if (gamma <= 0.0) {
      throw Error(ErrorKind::Singularity, "G^gamma undefined at G = 0 with gamma <= 0");
    }
    return 0.0;
  }
  const double dg = alpha * std::pow(g, gamma);
  if (!std::isfinite(dg)) {
    throw Error(ErrorKind::Range, "conductance change overflows");
  }
  return dg;
}

ConductanceState apply_pulse(ConductanceState state, const MemristorParams& params, double x) {
  if (state.g <= params.g_floor) {
    // The floor absorbs; still reject a bad amplitude.
    require_finite_amplitude(x);
    return {params.g_floor};
  }
  const double next = state.g + delta_g(params, state.g, x);
  return {std::max(next, params.g_floor)};
}

std::vector<double> apply_pulse_train(double g0, const MemristorParams& params,
                                      std::span<const double> xs) {
  if (!(g0 >= params.g_floor) || !std::isfinite(g0)) {
    throw Error(ErrorKind::InvalidInput, "initial conductance below g_floor");
  }
  std::vector<double> trajectory;
  trajectory.reserve(xs.size() + 1);
  trajectory.push_back(g0);
  ConductanceState state{g0};
  for (double x : xs) {
    state = apply_pulse(state, params, x);
    trajectory.push_back(state.g);
  }
  return trajectory;
}

double total_erase(const MemristorParams& params, std::span<const double> xs) {
  ConductanceState state{params.g_on};
  for (double x : xs) {
    state = apply_pulse(state, params, x);
  }
  return params.g_on - state.g;
}

FitResult fit_erase_model(std::span<const EraseObservation> observations) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = observations[static_cast<std::size_t>(i)];
    if (!std::isfinite(obs.x) || !std::isfinite(obs.g_before) || !std::isfinite(obs.delta_g)) {
      throw Error(ErrorKind::InvalidInput, "observation " + std::to_string(i) + " is not finite");
    }
    if (!(obs.delta_g < 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  "observation " + std::to_string(i) + ": delta_g must be negative");
    }
    if (!(obs.g_before > 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  "observation " + std::to_string(i) + ": g_before must be positive");
    }
    const double log_g = std::log(obs.g_before);
    design(i, 0) = 1.0;
    design(i, 1) = obs.x;
    design(i, 2) = log_g;
    design(i, 3) = obs.x * log_g;
    target(i) = std::log(-obs.delta_g);
  }
  if (n < 4) {
    throw Error(ErrorKind::FitDegenerate,
                "need at least 4 observations, got " + std::to_string(n));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-9);
  if (qr.rank() < 4) {
    throw Error(ErrorKind::FitDegenerate,
                "design matrix has rank " + std::to_string(qr.rank()) + " < 4");
  }
  const Eigen::Vector4d coeffs = qr.solve(target);

  FitResult result;
  result.params.k = std::exp(coeffs(0));
  result.params.p = coeffs(1);
  result.params.b = coeffs(2);
  result.params.a = -coeffs(3);
  result.observations = observations.size();
  result.rms_log_residual = std::sqrt((design * coeffs - target).squaredNorm() / static_cast<double>(n));
  try {
    result.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::FitDegenerate, std::string("fitted parameters invalid: ") + e.what());
  }
  return result;
}

MemristorParams fit_params(std::span<const EraseObservation> observations) {
  return fit_erase_model(observations).params;
}

} // namespace memtransform

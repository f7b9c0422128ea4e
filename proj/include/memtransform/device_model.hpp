#pragma once

#include <span>
#include <vector>

namespace memtransform {

// Constants of the idealized erase law
//
//   dG = alpha(x) * G^gamma(x),  gamma(x) = -A x + B,  alpha(x) = -K exp(P x)
//
// with x the erase amplitude in volts and G in normalized conductance units.
struct MemristorParams {
  double a = 7.0;       // V^-1
  double b = 16.1;
  double k = 6.31e-30;
  double p = 32.24;     // V^-1
  double g_on = 10.0;   // conductance after a reset to the ON state
  double g_floor = 0.0; // clamp applied after every pulse

  // Throws Error(Config) unless A, K, P > 0, B finite and g_on > g_floor >= 0.
  void validate() const;
};

struct ConductanceState {
  double g = 0.0;
};

// One (x, G, dG) sample of a measured erase curve.
struct EraseObservation {
  double x = 0.0;
  double g_before = 0.0;
  double delta_g = 0.0;
};

struct FitResult {
  MemristorParams params;
  // RMS of the log-space residual ln|dG| - model.
  double rms_log_residual = 0.0;
  std::size_t observations = 0;
};

double gamma_of(const MemristorParams& params, double x);
double alpha_of(const MemristorParams& params, double x);

// Conductance change of a single pulse. Always <= 0 for g >= 0.
double delta_g(const MemristorParams& params, double g, double x);

ConductanceState apply_pulse(ConductanceState state, const MemristorParams& params, double x);

// Returns g0 followed by the conductance after each pulse (size xs.size() + 1).
std::vector<double> apply_pulse_train(double g0, const MemristorParams& params,
                                      std::span<const double> xs);

// Resets to g_on, applies xs and returns the total conductance drop.
double total_erase(const MemristorParams& params, std::span<const double> xs);

/// Least-squares fit of A, B, K, P from erase observations.
///
/// Taking logs of the erase law gives a model linear in (ln K, P, B, A):
///
///   ln|dG| = ln K + P x + B ln G - A x ln G
///
/// which is solved with a column-pivoted QR. g_on and g_floor keep their
/// defaults. Throws Error(InvalidInput) for non-negative dG or non-positive G
/// and Error(FitDegenerate) when the design matrix is rank deficient.
FitResult fit_erase_model(std::span<const EraseObservation> observations);

MemristorParams fit_params(std::span<const EraseObservation> observations);

} // namespace memtransform

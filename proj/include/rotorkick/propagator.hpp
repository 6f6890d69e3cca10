#pragma once

// Finite-width Gaussian pulses: Strang split-operator propagation in a
// truncated Legendre basis (FBR) with a Gauss-Legendre grid (DVR).

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rotorkick/specfun.hpp"
#include "rotorkick/types.hpp"
#include "rotorkick/wavepacket.hpp"

namespace rotorkick::propagator {

/// Steps whose field strength times dt stays below this are free evolution.
inline constexpr double kFreeStepThreshold = 1e-18;
inline constexpr double kInstabilityThreshold = 1e-8;

struct PropagatorConfig {
  int j_max = 20;
  double dt = 1e-3;
  specfun::QuadratureRule rule = specfun::gauss_legendre(42);
  /// Store every n-th step. The initial and final states are always stored.
  int record_stride = 1;

  /// dt = min(sigma / 100, 0.25 / E_jmax), rule order 2 j_max + 2, about
  /// 1000 recorded samples over the window.
  static PropagatorConfig defaults(int j_max, double sigma);

  /// Requires rule order >= 2 j_max + 2 and dt <= min(sigma / 50, 0.5 / E_jmax).
  void validate(double sigma) const;

  /// No intermediate snapshots.
  static constexpr int kRecordNone = std::numeric_limits<int>::max();
};

struct Snapshot {
  double tau = 0.0;
  std::vector<cplx> coeffs;  // J = 0..j_max
};

struct PropagationResult {
  Wavepacket final_state;
  std::vector<Snapshot> trajectory;
  std::vector<std::pair<double, double>> kinetic_series;  // (tau, <J^2>)
  double norm_defect_max = 0.0;
  long steps = 0;
  long active_steps = 0;
  double dt = 0.0;  // effective step, tau0 / steps
};

/// Closed-form erf integrals of eta and zeta over [0, tau0].
KickStrengths kick_strengths_of(const GaussianPulse& pulse);

/// Inverse of kick_strengths_of at fixed sigma with tau0 = 100 sigma.
GaussianPulse pulse_for_kicks(const KickStrengths& target, double sigma);

/// Integrates i dpsi/dtau = (J^2 - eta x - zeta x^2) psi over [0, tau0].
/// Only m0 = 0 is supported. Throws InstabilityError when the norm defect
/// exceeds 1e-8.
PropagationResult propagate(const InitialState& init, const GaussianPulse& pulse,
                            const PropagatorConfig& cfg);

enum class Direction { forward, backward };

/// Forward: FBR coefficients to sqrt(w_n)-weighted grid values through
/// T[n, J] = sqrt(w_n) sqrt((2J+1)/2) P_J(x_n). Backward applies T^T.
std::vector<cplx> fbr_dvr_transform(std::span<const cplx> in, const specfun::QuadratureRule& rule,
                                    int j_max, Direction direction);

}  // namespace rotorkick::propagator

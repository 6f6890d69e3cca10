#pragma once

// Reduced descriptions: the two-level (J = 0, 1) model and sigma-resonance
// scans, the classical kicked ensemble, and characteristic rays of carpets.

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "rotorkick/specfun.hpp"
#include "rotorkick/types.hpp"
#include "rotorkick/wavepacket.hpp"

namespace rotorkick::reduced {

/// Interaction-picture amplitudes of Y_0^0 and Y_1^0.
struct TwoLevelState {
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
  double norm_drift_max = 0.0;
  long steps = 0;

  /// Post-pulse <J^2> = 2 |c1|^2.
  double energy() const { return 2.0 * std::norm(c1); }
};

/// RK4 over [0, tau0] from c0 = 1. Only eta couples the two states. dt <= 0
/// means sigma / 2000. Throws InstabilityError if the norm drifts by > 1e-8.
TwoLevelState two_level_propagate(const GaussianPulse& pulse, double dt = 0.0);

enum class Engine { two_level, full };

const char* to_string(Engine e);

struct Resonance {
  double sigma_r = 0.0;
  int order = 0;
  double energy = 0.0;         // <J^2> at sigma_r
  double depth_decades = 0.0;  // below the lower of the two flanking maxima
};

struct ResonanceScan {
  Engine engine = Engine::two_level;
  KickStrengths kick;
  std::vector<double> sigmas;
  std::vector<double> energies;
  std::vector<Resonance> resonances;  // ascending sigma_r, order 1, 2, ...
};

struct ScanOptions {
  int workers = 0;                     // <= 0: all cores
  int j_max = 0;                       // full engine; <= 0: auto from the sudden packet
  double refine_tolerance = 1e-4;      // golden-section resolution in sigma
  double min_depth_decades = 2.0;
  double relative_floor = 1e-16;       // flanking maxima must exceed this times the scan maximum
};

/// Post-pulse <J^2> for the pulse of width sigma carrying `kick`.
double post_pulse_energy(const KickStrengths& kick, double sigma, Engine engine, int j_max = 0);

/// Log-spaced scan of n >= 50 widths over [lo, hi] with minimum detection and
/// golden-section refinement.
ResonanceScan resonance_scan(const KickStrengths& kick, double lo, double hi, int n, Engine engine,
                             const ScanOptions& opts = {});

struct ResonanceRow {
  double p_eta = 0.0;
  double sigma_r = 0.0;
  int order = 0;
};

/// Two-level scans for n_eta purely orienting kicks evenly spaced over
/// [eta_lo, eta_hi]. n_eta = 0 gives an empty map.
std::vector<ResonanceRow> resonance_map(double eta_lo, double eta_hi, int n_eta, double sigma_lo,
                                        double sigma_hi, int n_sigma = 120, int workers = 0);

/// Mean spacing in P_eta of the prominent peaks of sigma_r(P_eta) for one
/// resonance order. Peaks need a prominence of at least a quarter of the
/// series range. NaN with fewer than two peaks.
double oscillation_period(std::span<const ResonanceRow> rows, int order = 1);

/// Ensemble-averaged classical kinetic energy after the kick,
///   1/2 int (1 - x^2) (P_eta + 2 P_zeta x)^2 dx.
double classical_kick_energy(const KickStrengths& kick, const specfun::QuadratureRule& rule);

/// Mean angular momentum from the kick closed form.
double j_bar_closed_form(const KickStrengths& kick);

/// Root of J(J+1) = <J^2> of the packet.
double j_bar_from_packet(const Wavepacket& wp);

struct Ray {
  enum class Kind { classical, reversed, fractional, reversed_fractional } kind = Kind::classical;
  int beta = -1;   // reflection index, classical and reversed rays
  double nu = 0;   // revival fraction, fractional rays
  std::vector<std::pair<double, double>> points;  // (tau, theta)
};

const char* to_string(Ray::Kind k);

struct RaySet {
  double j_bar = 0.0;
  int j_bar_rounded = 0;
  double tau_cl = 0.0;
  double tau_f = 0.0;
  double tau_rf = 0.0;
  double tau_rf_lo = 0.0;  // bracket; equals tau_rf when exact
  double tau_rf_hi = 0.0;
  bool tau_rf_approximate = false;
  std::vector<Ray> rays;
};

/// Rays clipped to [0, pi] x [0, pi]. tau_rf = pi - tau_f for purely orienting
/// kicks; otherwise the maximum of |psi(pi, tau)|^2 over (0.8 pi, pi), with the
/// neighbouring grid points as bracket.
RaySet ray_set(const Wavepacket& wp, const KickStrengths& kick, int beta_max, std::span<const double> fractions);

}  // namespace rotorkick::reduced

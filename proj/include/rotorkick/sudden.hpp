#pragma once

// Exact post-kick wavepackets in the sudden limit. The kick multiplies the
// initial state by exp(i (P_eta x + P_zeta x^2)), x = cos(theta); its Legendre
// coefficients c^{J'} are contracted with Clebsch-Gordan coefficients to give
// the state coefficients C^J.

#include <vector>

#include "rotorkick/specfun.hpp"
#include "rotorkick/types.hpp"
#include "rotorkick/wavepacket.hpp"

namespace rotorkick::sudden {

inline constexpr int kSeriesDefaultKMax = 80;
inline constexpr int kSeriesMaxKMax = 120;
inline constexpr int kSeriesMaxJPrime = 60;
inline constexpr int kAutoJMaxStart = 20;
inline constexpr int kAutoJMaxCap = 128;

/// Legendre coefficients of the kick phase factor,
///   exp(i (P_eta x + P_zeta x^2)) = sum_J' c^{J'} P_J'(x).
struct PhaseExpansion {
  KickStrengths kick;
  std::vector<cplx> c;  // J' = 0..j_prime_max
  enum class Method { series, quadrature } method = Method::quadrature;
  int k_max = 0;        // series only
  int rule_order = 0;   // quadrature only
  /// Series only: |k = k_max shell| of c^{J'} per J'.
  std::vector<double> last_shell;
  /// Series only: largest of the last two k-shells over all J'.
  double truncation_estimate = 0.0;

  int j_prime_max() const { return static_cast<int>(c.size()) - 1; }
  /// sum_J' c^{J'} P_J'(x).
  cplx evaluate(double x) const;
};

/// Double power series in (P_eta, P_zeta) with the closed-form moments
/// int P_J'(x) x^n dx, summed in long double up to shell k = k_max.
/// Throws ConvergenceError when the last shell exceeds 1e-12 max|c|.
PhaseExpansion phase_coeffs_series(const KickStrengths& kick, int j_prime_max,
                                   int k_max = kSeriesDefaultKMax);

/// Direct quadrature of (2J'+1)/2 int P_J'(x) exp(i(...)) dx. The rule order must
/// be at least 2 j_prime_max.
PhaseExpansion phase_coeffs_quadrature(const KickStrengths& kick, int j_prime_max,
                                       const specfun::QuadratureRule& rule);

/// Same with a rule sized for j_prime_max and kicks up to ~20.
PhaseExpansion phase_coeffs_quadrature(const KickStrengths& kick, int j_prime_max);

/// C^J for J = |m0|..j_max. `phase` must reach j_max + j0. Throws
/// NormalizationError when the norm is off by more than 1e-6; smaller defects
/// are kept, not renormalized.
Wavepacket kick_wavepacket(const InitialState& init, const PhaseExpansion& phase, int j_max);

/// C^J = i^J sqrt(2J+1) j_J(P_eta), ground-state start.
Wavepacket orienting_closed_form(double p_eta, int j_max);

/// Even J from the 1F1(J/2 + 1/2; J + 3/2; i P_zeta) closed form, odd J zero.
Wavepacket aligning_closed_form(double p_zeta, int j_max);

/// Smallest j_max = 20 * 2^k (capped at 128) whose packet tail is below 1e-14.
int auto_j_max(const KickStrengths& kick, const InitialState& init = {});

/// Production entry point: quadrature coefficients, Clebsch-Gordan contraction,
/// identity fast path for the zero kick. j_max <= 0 selects auto_j_max.
Wavepacket delta_kick(const InitialState& init, const KickStrengths& kick, int j_max = 0);

}  // namespace rotorkick::sudden

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rotorkick/types.hpp"

namespace rotorkick {

using cplx = std::complex<double>;

/// Where a wavepacket came from, carried into output sidecars.
struct Provenance {
  std::string origin = "identity";  // delta-kick, orienting-closed-form, propagated, csv, ...
  InitialState init{};
  std::optional<KickStrengths> kick;
  std::optional<GaussianPulse> pulse;
  std::string settings;  // free-form truncation / integrator settings
};

/// Expansion coefficients C^J over Y_J^m, J = |m|..j_max, at fixed m.
/// Energies E_J = J(J+1) follow from the index.
class Wavepacket {
 public:
  static constexpr double kNormTolerance = 1e-9;
  static constexpr double kTailThreshold = 1e-14;

  Wavepacket(int m, std::vector<cplx> coeffs, Provenance meta = {});

  /// Y_{j0}^{m0} itself, padded with zeros up to j_max.
  static Wavepacket identity(const InitialState& init, int j_max);

  int m() const { return m_; }
  int j_min() const { return m_ < 0 ? -m_ : m_; }
  int j_max() const { return j_min() + static_cast<int>(coeffs_.size()) - 1; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  const Provenance& meta() const { return meta_; }

  /// C^J, or 0 outside the stored range.
  cplx coeff(int j) const;
  double population(int j) const { return std::norm(coeff(j)); }

  double norm() const;
  double norm_defect() const;
  bool is_normalized(double tol = kNormTolerance) const { return norm_defect() <= tol; }

  /// Largest population among the two top states. Two are needed because
  /// parity-restricted packets leave every other state empty.
  double tail_population() const;
  bool is_certified(double threshold = kTailThreshold) const { return tail_population() < threshold; }

  /// gamma_J = arg C^J.
  double phase(int j) const { return std::arg(coeff(j)); }
  /// gamma_J - gamma_J' wrapped to (-pi, pi].
  double phase_difference(int j, int jp) const;

  static double energy(int j) { return static_cast<double>(j) * (j + 1); }
  static double energy_gap(int j, int jp) { return energy(j) - energy(jp); }

  /// Field-free evolution: C^J -> C^J exp(-i E_J tau).
  Wavepacket evolved(double tau) const;

  Wavepacket with_meta(Provenance meta) const;

 private:
  int m_;
  std::vector<cplx> coeffs_;
  Provenance meta_;
};

}  // namespace rotorkick

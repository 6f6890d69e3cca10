#pragma once

// Small value types shared by the sudden-limit and finite-pulse code paths.

namespace rotorkick {

/// Time integrals of the orienting (eta) and aligning (zeta) interaction
/// strengths. The working domain is [0, 10] for both; larger values are
/// accepted but not covered by the tests.
struct KickStrengths {
  double p_eta = 0.0;
  double p_zeta = 0.0;

  void validate() const;
  bool is_zero() const { return p_eta == 0.0 && p_zeta == 0.0; }
};

/// Field-free eigenstate Y_{j0}^{m0} the rotor starts in.
struct InitialState {
  int j0 = 0;
  int m0 = 0;

  void validate() const;
};

/// Gaussian pulse on the window [0, tau0], centred at tau0 / 2.
///   eta(tau)  = eta0 / (sqrt(2 pi) sigma) exp(-(tau - tau0/2)^2 / (2 sigma^2))
///   zeta(tau) = zeta0 / (2 pi sigma^2)    exp(-(tau - tau0/2)^2 / sigma^2)
struct GaussianPulse {
  double eta0 = 0.0;
  double zeta0 = 0.0;
  double sigma = 1.0;
  double tau0 = 100.0;

  static constexpr double kWindowFactor = 100.0;

  /// Pulse with the standard window tau0 = 100 sigma.
  static GaussianPulse with_default_window(double eta0, double zeta0, double sigma);

  void validate() const;
  double eta(double tau) const;
  double zeta(double tau) const;

  /// Half-width around tau0/2 outside of which both eta and zeta stay below
  /// `threshold`. Zero when neither envelope ever reaches it.
  double active_half_width(double threshold) const;
};

}  // namespace rotorkick

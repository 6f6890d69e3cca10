#pragma once

// Special-function kernel for the rigid-rotor code: Legendre polynomials,
// m-resolved spherical harmonics, spherical Bessel functions, 1F1 on the
// imaginary axis, Clebsch-Gordan coefficients and Gauss-Legendre rules.
//
// Everything here is a pure function of its arguments.

#include <complex>
#include <span>
#include <vector>

namespace rotorkick::specfun {

inline constexpr double kPi = 3.14159265358979323846;

/// Gauss-Legendre rule on [-1, 1]. Nodes are the x = cos(theta) values of the
/// discrete variable representation.
class QuadratureRule {
 public:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Sum of w_n f(x_n).
  template <typename F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) acc{};
    for (std::size_t n = 0; n < nodes_.size(); ++n) acc += weights_[n] * f(nodes_[n]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline constexpr int kMaxQuadratureOrder = 4096;
inline constexpr int kDefaultQuadratureOrder = 256;

/// Nodes by Newton iteration on P_order from asymptotic starting guesses.
QuadratureRule gauss_legendre(int order);

/// Legendre polynomial P_j(x) by upward recurrence. Throws InputError for
/// |x| > 1 + 1e-12.
double legendre_p(int j, double x);

/// Fills out[j] = P_j(x) for j = 0..out.size()-1.
void legendre_table(double x, std::span<double> out);

/// Real theta-part of Y_j^m in the Condon-Shortley convention, so that
/// Y_j^m(theta, phi) = sph_harm_m(j, m, theta) * exp(i m phi).
double sph_harm_m(int j, int m, double theta);

/// out[k] = sph_harm_m(|m| + k, m, theta) for k = 0..out.size()-1, in one
/// recurrence pass.
void sph_harm_table(int m, double theta, std::span<double> out);

/// Spherical Bessel function of the first kind j_n(x), x >= 0.
double sph_bessel_j(int n, double x);

/// 1F1(a; b; i p) by direct Maclaurin summation (|p| <= 50).
std::complex<double> hyp1f1_imag(double a, double b, double p);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// log(n!) from a cached table.
double log_factorial(int n);

struct CGKey {
  int j1 = 0, m1 = 0;
  int j2 = 0, m2 = 0;
  int j3 = 0, m3 = 0;

  bool valid() const;
};

/// <j1 m1, j2 m2 | j3 m3> from the Racah sum in log-factorial space. Returns
/// exactly 0 for any coupling that is forbidden or malformed.
double clebsch_gordan(const CGKey& key);

}  // namespace rotorkick::specfun

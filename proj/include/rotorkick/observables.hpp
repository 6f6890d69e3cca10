#pragma once

// Field-free observables of a wavepacket: populations, <J^2>, orientation and
// alignment cosines, exact line spectra, density and quantum carpets.

#include <span>
#include <utility>
#include <vector>

#include "rotorkick/specfun.hpp"
#include "rotorkick/wavepacket.hpp"

namespace rotorkick::observables {

/// Revival period of the free rotor in units of hbar / B.
inline constexpr double kRevivalTime = specfun::kPi;
inline constexpr double kImagResidueTolerance = 1e-12;

/// (J, |C^J|^2) for every stored J.
std::vector<std::pair<int, double>> populations(const Wavepacket& wp);

/// sum_J J(J+1) |C^J|^2.
double kinetic_energy(const Wavepacket& wp);

/// <cos theta>(tau), m = 0 only.
std::vector<double> orientation_series(const Wavepacket& wp, std::span<const double> taus);

struct AlignmentSeries {
  double pop = 0.0;              // time-independent part
  std::vector<double> coherent;  // oscillating part per tau
};

/// <cos^2 theta>(tau) = pop + coherent(tau), m = 0 only.
AlignmentSeries alignment_series(const Wavepacket& wp, std::span<const double> taus);

enum class Observable { orientation, alignment };

const char* to_string(Observable o);

struct LineSpectrum {
  Observable observable = Observable::orientation;
  /// (Bohr frequency, amplitude) sorted by frequency. Amplitudes are
  /// 2 |A_f| for f > 0 so that the signal is sum amp cos(f tau + phi); the f = 0
  /// entry of an alignment spectrum is the population part.
  std::vector<std::pair<int, double>> entries;
};

/// Exact line spectrum assembled from coefficient products, m = 0 only.
LineSpectrum line_spectrum(const Wavepacket& wp, Observable observable);

/// |psi(theta, tau)|^2 per unit solid angle.
double density_at(const Wavepacket& wp, double theta, double tau);

struct Carpet {
  std::vector<double> thetas;   // ascending, acos of Gauss-Legendre nodes
  std::vector<double> weights;  // matching quadrature weights in x = cos(theta)
  std::vector<double> taus;
  std::vector<double> density;  // row-major, thetas.size() x taus.size()

  double at(std::size_t i_theta, std::size_t i_tau) const { return density[i_theta * taus.size() + i_tau]; }
  /// 2 pi int |psi|^2 sin(theta) dtheta for one column.
  double slice_norm(std::size_t i_tau) const;
};

/// Density on a Gauss-Legendre theta grid times an evenly spaced tau grid over [0, pi].
Carpet carpet(const Wavepacket& wp, int n_theta, int n_tau);

/// Same, on caller-supplied times.
Carpet carpet(const Wavepacket& wp, int n_theta, std::span<const double> taus);

/// (1/pi) int_0^pi <cos theta> dtau from the analytic integral of each
/// Fourier term.
double time_averaged_orientation(const Wavepacket& wp);

struct ObservableSeries {
  std::vector<double> taus;
  std::vector<double> orientation;
  std::vector<double> alignment;
  std::vector<double> alignment_coherent;
  double alignment_pop = 0.0;
  double kinetic = 0.0;
};

ObservableSeries observable_series(const Wavepacket& wp, std::span<const double> taus);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace rotorkick::observables

#include "rotorkick/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotorkick/errors.hpp"

namespace rotorkick::observables {

namespace {

void require_m0(const Wavepacket& wp, const char* what) {
  if (wp.m() != 0) throw InputError(std::string(what) + ": only m = 0 wavepackets are supported");
}

// <J+1|cos|J> for m = 0.
double cos_band(int j) { return (j + 1.0) / std::sqrt((2.0 * j + 1.0) * (2.0 * j + 3.0)); }

// <J|cos^2|J> for m = 0.
double cos2_diag(int j) {
  const double jj = j;
  return 1.0 / 3.0 + 2.0 * jj * (jj + 1.0) / (3.0 * (2.0 * jj - 1.0) * (2.0 * jj + 3.0));
}

// <J+2|cos^2|J> for m = 0.
double cos2_band(int j) {
  const double jj = j;
  return (jj + 1.0) * (jj + 2.0) / ((2.0 * jj + 3.0) * std::sqrt((2.0 * jj + 1.0) * (2.0 * jj + 5.0)));
}

// C^J exp(-i E_J tau) for J = 0..j_max.
std::vector<cplx> evolved_coeffs(const Wavepacket& wp, double tau) {
  const auto c = wp.coeffs();
  std::vector<cplx> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const int j = wp.j_min() + static_cast<int>(k);
    out[k] = c[k] * std::polar(1.0, -Wavepacket::energy(j) * tau);
  }
  return out;
}

double checked_real(cplx v, double tau, const char* what) {
  if (std::abs(v.imag()) > kImagResidueTolerance) {
    throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(v.imag()) +
                         " at tau=" + std::to_string(tau));
  }
  return v.real();
}

}  // namespace

std::vector<std::pair<int, double>> populations(const Wavepacket& wp) {
  std::vector<std::pair<int, double>> out;
  out.reserve(wp.coeffs().size());
  for (int j = wp.j_min(); j <= wp.j_max(); ++j) out.emplace_back(j, wp.population(j));
  return out;
}

double kinetic_energy(const Wavepacket& wp) {
  double s = 0.0;
  for (int j = wp.j_min(); j <= wp.j_max(); ++j) s += Wavepacket::energy(j) * wp.population(j);
  return s;
}

std::vector<double> orientation_series(const Wavepacket& wp, std::span<const double> taus) {
  require_m0(wp, "orientation_series");
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    const auto c = evolved_coeffs(wp, tau);
    cplx upper{}, lower{};
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      const double a = cos_band(static_cast<int>(j));
      upper += a * std::conj(c[j + 1]) * c[j];
      lower += a * std::conj(c[j]) * c[j + 1];
    }
    out.push_back(checked_real(upper + lower, tau, "orientation_series"));
  }
  return out;
}

AlignmentSeries alignment_series(const Wavepacket& wp, std::span<const double> taus) {
  require_m0(wp, "alignment_series");
  AlignmentSeries out;
  const auto c0 = wp.coeffs();
  for (std::size_t j = 0; j < c0.size(); ++j) out.pop += cos2_diag(static_cast<int>(j)) * std::norm(c0[j]);
  out.coherent.reserve(taus.size());
  for (double tau : taus) {
    const auto c = evolved_coeffs(wp, tau);
    cplx upper{}, lower{};
    for (std::size_t j = 0; j + 2 < c.size(); ++j) {
      const double b = cos2_band(static_cast<int>(j));
      upper += b * std::conj(c[j + 2]) * c[j];
      lower += b * std::conj(c[j]) * c[j + 2];
    }
    out.coherent.push_back(checked_real(upper + lower, tau, "alignment_series"));
  }
  return out;
}

const char* to_string(Observable o) {
  return o == Observable::orientation ? "orientation" : "alignment";
}

LineSpectrum line_spectrum(const Wavepacket& wp, Observable observable) {
  require_m0(wp, "line_spectrum");
  LineSpectrum out;
  out.observable = observable;
  const auto c = wp.coeffs();
  if (observable == Observable::orientation) {
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      const double amp = 2.0 * cos_band(static_cast<int>(j)) * std::abs(std::conj(c[j + 1]) * c[j]);
      if (amp != 0.0) out.entries.emplace_back(2 * (static_cast<int>(j) + 1), amp);
    }
  } else {
    double pop = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) pop += cos2_diag(static_cast<int>(j)) * std::norm(c[j]);
    out.entries.emplace_back(0, pop);
    for (std::size_t j = 0; j + 2 < c.size(); ++j) {
      const double amp = 2.0 * cos2_band(static_cast<int>(j)) * std::abs(std::conj(c[j + 2]) * c[j]);
      if (amp != 0.0) out.entries.emplace_back(2 * (2 * static_cast<int>(j) + 3), amp);
    }
  }
  return out;
}

double density_at(const Wavepacket& wp, double theta, double tau) {
  if (!(theta >= -1e-12 && theta <= specfun::kPi + 1e-12)) throw InputError("density_at: theta outside [0, pi]");
  std::vector<double> y(wp.coeffs().size());
  specfun::sph_harm_table(wp.m(), theta, y);
  const auto c = evolved_coeffs(wp, tau);
  cplx psi{};
  for (std::size_t k = 0; k < c.size(); ++k) psi += c[k] * y[k];
  return std::norm(psi);
}

double Carpet::slice_norm(std::size_t i_tau) const {
  double s = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) s += weights[i] * at(i, i_tau);
  return 2.0 * specfun::kPi * s;
}

Carpet carpet(const Wavepacket& wp, int n_theta, std::span<const double> taus) {
  if (n_theta < 2) throw InputError("carpet: need at least 2 theta points");
  if (taus.size() < 2) throw InputError("carpet: need at least 2 tau points");
  const specfun::QuadratureRule rule = specfun::gauss_legendre(n_theta);
  Carpet out;
  out.taus.assign(taus.begin(), taus.end());
  const std::size_t nt = static_cast<std::size_t>(n_theta);
  const std::size_t nb = wp.coeffs().size();
  std::vector<double> y(nt * nb);
  for (std::size_t i = 0; i < nt; ++i) {
    // Ascending theta is descending x.
    const std::size_t src = nt - 1 - i;
    const double theta = std::acos(std::clamp(rule.nodes()[src], -1.0, 1.0));
    out.thetas.push_back(theta);
    out.weights.push_back(rule.weights()[src]);
    specfun::sph_harm_table(wp.m(), theta, std::span<double>(y.data() + i * nb, nb));
  }
  out.density.assign(nt * taus.size(), 0.0);
  for (std::size_t t = 0; t < taus.size(); ++t) {
    const auto c = evolved_coeffs(wp, taus[t]);
    for (std::size_t i = 0; i < nt; ++i) {
      cplx psi{};
      for (std::size_t k = 0; k < nb; ++k) psi += c[k] * y[i * nb + k];
      out.density[i * taus.size() + t] = std::norm(psi);
    }
  }
  return out;
}

Carpet carpet(const Wavepacket& wp, int n_theta, int n_tau) {
  if (n_tau < 2) throw InputError("carpet: need at least 2 tau points");
  const auto taus = linspace(0.0, kRevivalTime, n_tau);
  return carpet(wp, n_theta, taus);
}

double time_averaged_orientation(const Wavepacket& wp) {
  require_m0(wp, "time_averaged_orientation");
  const auto c = wp.coeffs();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < c.size(); ++j) {
    const double f = 2.0 * (static_cast<double>(j) + 1.0);
    const cplx a = cos_band(static_cast<int>(j)) * std::conj(c[j + 1]) * c[j];
    // int_0^pi exp(i f tau) dtau
    const cplx integral = (std::polar(1.0, f * kRevivalTime) - 1.0) / cplx(0.0, f);
    s += 2.0 * (a * integral).real();
  }
  return s / kRevivalTime;
}

ObservableSeries observable_series(const Wavepacket& wp, std::span<const double> taus) {
  ObservableSeries out;
  out.taus.assign(taus.begin(), taus.end());
  out.orientation = orientation_series(wp, taus);
  AlignmentSeries al = alignment_series(wp, taus);
  out.alignment_pop = al.pop;
  out.alignment_coherent = std::move(al.coherent);
  out.alignment.reserve(taus.size());
  for (double v : out.alignment_coherent) out.alignment.push_back(al.pop + v);
  out.kinetic = kinetic_energy(wp);
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InputError("linspace: need n >= 1");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  v.back() = hi;
  return v;
}

}  // namespace rotorkick::observables

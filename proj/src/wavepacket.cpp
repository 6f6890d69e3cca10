#include "rotorkick/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rotorkick/errors.hpp"
#include "rotorkick/specfun.hpp"

namespace rotorkick {

void KickStrengths::validate() const {
  if (!std::isfinite(p_eta) || !std::isfinite(p_zeta) || p_eta < 0.0 || p_zeta < 0.0) {
    throw InputError("kick strengths must be finite and non-negative");
  }
}

void InitialState::validate() const {
  if (j0 < 0 || std::abs(m0) > j0) throw InputError("initial state needs j0 >= 0 and |m0| <= j0");
}

GaussianPulse GaussianPulse::with_default_window(double eta0, double zeta0, double sigma) {
  GaussianPulse p{eta0, zeta0, sigma, kWindowFactor * sigma};
  p.validate();
  return p;
}

void GaussianPulse::validate() const {
  if (!std::isfinite(eta0) || !std::isfinite(zeta0) || eta0 < 0.0 || zeta0 < 0.0) {
    throw InputError("pulse amplitudes must be finite and non-negative");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("pulse width sigma must be positive");
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) throw InputError("pulse window tau0 must be positive");
}

double GaussianPulse::eta(double tau) const {
  if (eta0 == 0.0) return 0.0;
  const double u = (tau - 0.5 * tau0) / sigma;
  return eta0 / (std::sqrt(2.0 * specfun::kPi) * sigma) * std::exp(-0.5 * u * u);
}

double GaussianPulse::zeta(double tau) const {
  if (zeta0 == 0.0) return 0.0;
  const double u = (tau - 0.5 * tau0) / sigma;
  return zeta0 / (2.0 * specfun::kPi * sigma * sigma) * std::exp(-u * u);
}

double GaussianPulse::active_half_width(double threshold) const {
  double half = 0.0;
  const double peak_eta = eta0 / (std::sqrt(2.0 * specfun::kPi) * sigma);
  if (peak_eta > threshold) half = std::max(half, sigma * std::sqrt(2.0 * std::log(peak_eta / threshold)));
  const double peak_zeta = zeta0 / (2.0 * specfun::kPi * sigma * sigma);
  if (peak_zeta > threshold) half = std::max(half, sigma * std::sqrt(std::log(peak_zeta / threshold)));
  return half;
}

Wavepacket::Wavepacket(int m, std::vector<cplx> coeffs, Provenance meta)
    : m_(m), coeffs_(std::move(coeffs)), meta_(std::move(meta)) {
  if (coeffs_.empty()) throw InputError("wavepacket needs at least one coefficient");
  for (const cplx& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw NumericalError("wavepacket coefficient is not finite");
    }
  }
}

Wavepacket Wavepacket::identity(const InitialState& init, int j_max) {
  init.validate();
  if (j_max < init.j0) throw InputError("identity wavepacket: j_max below j0");
  const int jmin = std::abs(init.m0);
  std::vector<cplx> c(static_cast<std::size_t>(j_max - jmin + 1), cplx{});
  c[static_cast<std::size_t>(init.j0 - jmin)] = 1.0;
  Provenance meta;
  meta.origin = "identity";
  meta.init = init;
  return Wavepacket(init.m0, std::move(c), std::move(meta));
}

cplx Wavepacket::coeff(int j) const {
  if (j < j_min() || j > j_max()) return {};
  return coeffs_[static_cast<std::size_t>(j - j_min())];
}

double Wavepacket::norm() const {
  double s = 0.0;
  for (const cplx& c : coeffs_) s += std::norm(c);
  return s;
}

double Wavepacket::norm_defect() const { return std::abs(norm() - 1.0); }

double Wavepacket::tail_population() const {
  double t = std::norm(coeffs_.back());
  if (coeffs_.size() > 1) t = std::max(t, std::norm(coeffs_[coeffs_.size() - 2]));
  return t;
}

double Wavepacket::phase_difference(int j, int jp) const {
  double d = phase(j) - phase(jp);
  while (d <= -specfun::kPi) d += 2.0 * specfun::kPi;
  while (d > specfun::kPi) d -= 2.0 * specfun::kPi;
  return d;
}

Wavepacket Wavepacket::evolved(double tau) const {
  std::vector<cplx> c(coeffs_);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double e = energy(j_min() + static_cast<int>(k));
    c[k] *= std::polar(1.0, -e * tau);
  }
  return Wavepacket(m_, std::move(c), meta_);
}

Wavepacket Wavepacket::with_meta(Provenance meta) const { return Wavepacket(m_, coeffs_, std::move(meta)); }

}  // namespace rotorkick

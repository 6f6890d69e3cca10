#include "rotorkick/sudden.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rotorkick/errors.hpp"

namespace rotorkick::sudden {

namespace {

using specfun::clebsch_gordan;
using specfun::CGKey;

// log of int_{-1}^{1} P_J'(x) x^n dx for n >= J', n + J' even.
long double log_moment(int n, int jp) {
  return 0.5L * std::log(static_cast<long double>(specfun::kPi)) -
         n * std::log(2.0L) + std::lgamma(static_cast<long double>(n) + 1.0L) -
         std::lgamma(static_cast<long double>(n - jp) / 2.0L + 1.0L) -
         std::lgamma(static_cast<long double>(n + jp + 3) / 2.0L);
}

Wavepacket contract(const InitialState& init, const PhaseExpansion& phase, int j_max) {
  init.validate();
  if (j_max < init.j0) throw InputError("kick_wavepacket: j_max below j0");
  if (phase.j_prime_max() < j_max + init.j0) {
    throw InputError("kick_wavepacket: phase expansion must reach j_max + j0 = " +
                     std::to_string(j_max + init.j0));
  }
  const int jmin = std::abs(init.m0);
  const int j0 = init.j0, m0 = init.m0;
  std::vector<cplx> coeffs;
  coeffs.reserve(static_cast<std::size_t>(j_max - jmin + 1));
  for (int j = jmin; j <= j_max; ++j) {
    if (j0 == 0) {
      coeffs.push_back(phase.c[static_cast<std::size_t>(j)] / std::sqrt(2.0 * j + 1.0));
      continue;
    }
    cplx sum{};
    for (int jp = std::abs(j - j0); jp <= j + j0; ++jp) {
      if ((j + jp + j0) % 2 != 0) continue;
      const double cg = clebsch_gordan(CGKey{jp, 0, j0, 0, j, 0}) *
                        clebsch_gordan(CGKey{jp, 0, j0, m0, j, m0});
      sum += phase.c[static_cast<std::size_t>(jp)] * cg;
    }
    coeffs.push_back(sum * std::sqrt((2.0 * j0 + 1.0) / (2.0 * j + 1.0)));
  }
  Provenance meta;
  meta.origin = "delta-kick";
  meta.init = init;
  meta.kick = phase.kick;
  meta.settings = phase.method == PhaseExpansion::Method::series
                      ? "series k_max=" + std::to_string(phase.k_max)
                      : "quadrature order=" + std::to_string(phase.rule_order);
  return Wavepacket(m0, std::move(coeffs), std::move(meta));
}

}  // namespace

cplx PhaseExpansion::evaluate(double x) const {
  std::vector<double> p(c.size());
  specfun::legendre_table(x, p);
  cplx s{};
  for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * p[j];
  return s;
}

PhaseExpansion phase_coeffs_series(const KickStrengths& kick, int j_prime_max, int k_max) {
  kick.validate();
  if (j_prime_max < 0 || j_prime_max > kSeriesMaxJPrime) {
    throw InputError("phase_coeffs_series: j_prime_max must lie in [0, 60]");
  }
  if (k_max < 0 || k_max > kSeriesMaxKMax) {
    throw InputError("phase_coeffs_series: k_max must lie in [0, 120]");
  }
  const long double pe = kick.p_eta, pz = kick.p_zeta;
  const long double log_pe = pe > 0 ? std::log(pe) : 0.0L;
  const long double log_pz = pz > 0 ? std::log(pz) : 0.0L;

  std::vector<long double> log_fact(static_cast<std::size_t>(k_max + 1));
  for (int n = 0; n <= k_max; ++n) log_fact[n] = std::lgamma(static_cast<long double>(n) + 1.0L);

  PhaseExpansion out;
  out.kick = kick;
  out.method = PhaseExpansion::Method::series;
  out.k_max = k_max;
  out.c.resize(static_cast<std::size_t>(j_prime_max + 1));
  out.last_shell.resize(out.c.size());

  for (int jp = 0; jp <= j_prime_max; ++jp) {
    const long double pref = (2.0L * jp + 1.0L) / 2.0L;
    long double re = 0.0L, im = 0.0L;
    long double shell_prev = 0.0L, shell = 0.0L;
    for (int k = 0; k <= k_max; ++k) {
      // Every term in a k-shell carries the same phase i^k.
      shell_prev = shell;
      shell = 0.0L;
      for (int l = 0; l <= k; ++l) {
        const int n = k + l;
        if (n < jp || (n + jp) % 2 != 0) continue;
        if (k - l > 0 && pe == 0.0L) continue;
        if (l > 0 && pz == 0.0L) continue;
        const long double lg = (k - l) * log_pe + l * log_pz - log_fact[l] - log_fact[k - l] +
                               log_moment(n, jp);
        shell += std::exp(lg);
      }
      switch (k % 4) {
        case 0: re += shell; break;
        case 1: im += shell; break;
        case 2: re -= shell; break;
        default: im -= shell; break;
      }
    }
    out.c[jp] = cplx(static_cast<double>(pref * re), static_cast<double>(pref * im));
    out.last_shell[jp] = static_cast<double>(pref * shell);
    out.truncation_estimate =
        std::max(out.truncation_estimate, static_cast<double>(pref * std::max(shell, shell_prev)));
  }

  double cmax = 0.0;
  for (const cplx& c : out.c) cmax = std::max(cmax, std::abs(c));
  if (out.truncation_estimate > 1e-12 * cmax) {
    throw ConvergenceError("phase_coeffs_series: last k-shell " +
                           std::to_string(out.truncation_estimate) +
                           " exceeds 1e-12 of the largest coefficient; raise k_max");
  }
  return out;
}

PhaseExpansion phase_coeffs_quadrature(const KickStrengths& kick, int j_prime_max,
                                       const specfun::QuadratureRule& rule) {
  kick.validate();
  if (j_prime_max < 0) throw InputError("phase_coeffs_quadrature: negative j_prime_max");
  if (rule.order() < 2 * j_prime_max) {
    throw InputError("phase_coeffs_quadrature: rule order " + std::to_string(rule.order()) +
                     " below 2 * j_prime_max");
  }
  PhaseExpansion out;
  out.kick = kick;
  out.method = PhaseExpansion::Method::quadrature;
  out.rule_order = rule.order();
  out.c.assign(static_cast<std::size_t>(j_prime_max + 1), cplx{});

  std::vector<double> p(out.c.size());
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const double x = nodes[n];
    const cplx f = std::polar(weights[n], kick.p_eta * x + kick.p_zeta * x * x);
    specfun::legendre_table(x, p);
    for (std::size_t j = 0; j < p.size(); ++j) out.c[j] += f * p[j];
  }
  for (std::size_t j = 0; j < out.c.size(); ++j) out.c[j] *= (2.0 * j + 1.0) / 2.0;
  // Even phase factor: odd J' vanish exactly, not just to round-off.
  if (kick.p_eta == 0.0) {
    for (std::size_t j = 1; j < out.c.size(); j += 2) out.c[j] = cplx{};
  }
  return out;
}

PhaseExpansion phase_coeffs_quadrature(const KickStrengths& kick, int j_prime_max) {
  const int order = std::max(specfun::kDefaultQuadratureOrder, 2 * j_prime_max + 64);
  return phase_coeffs_quadrature(kick, j_prime_max, specfun::gauss_legendre(order));
}

Wavepacket kick_wavepacket(const InitialState& init, const PhaseExpansion& phase, int j_max) {
  Wavepacket wp = contract(init, phase, j_max);
  if (wp.norm_defect() > 1e-6) {
    throw NormalizationError("kick_wavepacket: norm defect " + std::to_string(wp.norm_defect()) +
                             " at j_max=" + std::to_string(j_max) + "; basis too small");
  }
  return wp;
}

Wavepacket orienting_closed_form(double p_eta, int j_max) {
  KickStrengths{p_eta, 0.0}.validate();
  if (j_max < 0) throw InputError("orienting_closed_form: negative j_max");
  std::vector<cplx> c;
  c.reserve(static_cast<std::size_t>(j_max + 1));
  const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int j = 0; j <= j_max; ++j) {
    c.push_back(ipow[j % 4] * std::sqrt(2.0 * j + 1.0) * specfun::sph_bessel_j(j, p_eta));
  }
  Provenance meta;
  meta.origin = "orienting-closed-form";
  meta.kick = KickStrengths{p_eta, 0.0};
  return Wavepacket(0, std::move(c), std::move(meta));
}

Wavepacket aligning_closed_form(double p_zeta, int j_max) {
  KickStrengths{0.0, p_zeta}.validate();
  if (j_max < 0) throw InputError("aligning_closed_form: negative j_max");
  std::vector<cplx> c(static_cast<std::size_t>(j_max + 1), cplx{});
  const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int j = 0; j <= j_max; j += 2) {
    const int h = j / 2;
    if (h > 0 && p_zeta == 0.0) continue;
    const double logmag = (h > 0 ? h * std::log(p_zeta) : 0.0) + std::lgamma(h + 0.5) -
                          std::lgamma(j + 1.5);
    const cplx f = specfun::hyp1f1_imag(h + 0.5, j + 1.5, p_zeta);
    c[static_cast<std::size_t>(j)] = 0.5 * std::sqrt(2.0 * j + 1.0) * std::exp(logmag) * ipow[h % 4] * f;
  }
  Provenance meta;
  meta.origin = "aligning-closed-form";
  meta.kick = KickStrengths{0.0, p_zeta};
  return Wavepacket(0, std::move(c), std::move(meta));
}

int auto_j_max(const KickStrengths& kick, const InitialState& init) {
  kick.validate();
  init.validate();
  int j = std::max(kAutoJMaxStart, init.j0 + 1);
  while (true) {
    const Wavepacket wp = contract(init, phase_coeffs_quadrature(kick, j + init.j0), j);
    if (wp.is_certified()) return j;
    if (j >= kAutoJMaxCap) {
      throw ConvergenceError("auto_j_max: tail still above 1e-14 at j_max=" + std::to_string(j));
    }
    j = std::min(2 * j, kAutoJMaxCap);
  }
}

Wavepacket delta_kick(const InitialState& init, const KickStrengths& kick, int j_max) {
  init.validate();
  kick.validate();
  if (kick.is_zero()) {
    const int jm = j_max > 0 ? j_max : std::max(kAutoJMaxStart, init.j0);
    Provenance meta;
    meta.origin = "delta-kick";
    meta.init = init;
    meta.kick = kick;
    meta.settings = "identity fast path";
    return Wavepacket::identity(init, jm).with_meta(std::move(meta));
  }
  const int jm = j_max > 0 ? j_max : auto_j_max(kick, init);
  return kick_wavepacket(init, phase_coeffs_quadrature(kick, jm + init.j0), jm);
}

}  // namespace rotorkick::sudden

#include "rotorkick/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "rotorkick/errors.hpp"
#include "rotorkick/observables.hpp"
#include "rotorkick/parallel.hpp"
#include "rotorkick/propagator.hpp"
#include "rotorkick/sudden.hpp"

namespace rotorkick::reduced {

namespace {

constexpr double kPi = specfun::kPi;

double safe_log(double e) { return std::log(std::max(e, 1e-300)); }

}  // namespace

TwoLevelState two_level_propagate(const GaussianPulse& pulse, double dt) {
  pulse.validate();
  if (dt <= 0.0) dt = pulse.sigma / 2000.0;
  const long n = static_cast<long>(std::ceil(pulse.tau0 / dt - 1e-9));
  const double h = pulse.tau0 / static_cast<double>(n);
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);

  GaussianPulse orienting = pulse;
  orienting.zeta0 = 0.0;
  const double centre = pulse.tau0 / 2.0;
  const double half = orienting.active_half_width(propagator::kFreeStepThreshold / h);

  TwoLevelState s;
  s.steps = n;
  if (pulse.eta0 == 0.0) return s;

  auto rhs = [&](double tau, cplx a0, cplx a1, cplx& d0, cplx& d1) {
    const double g = orienting.eta(tau) * inv_sqrt3;
    const cplx carrier = std::polar(1.0, -2.0 * tau);
    d0 = cplx(0.0, g) * carrier * a1;
    d1 = cplx(0.0, g) * std::conj(carrier) * a0;
  };

  const long k_lo = std::max(0L, static_cast<long>(std::floor((centre - half) / h)));
  const long k_hi = std::min(n, static_cast<long>(std::ceil((centre + half) / h)));
  for (long k = k_lo; k < k_hi; ++k) {
    const double t = static_cast<double>(k) * h;
    cplx k10, k11, k20, k21, k30, k31, k40, k41;
    rhs(t, s.c0, s.c1, k10, k11);
    rhs(t + h / 2, s.c0 + h / 2 * k10, s.c1 + h / 2 * k11, k20, k21);
    rhs(t + h / 2, s.c0 + h / 2 * k20, s.c1 + h / 2 * k21, k30, k31);
    rhs(t + h, s.c0 + h * k30, s.c1 + h * k31, k40, k41);
    s.c0 += h / 6 * (k10 + 2.0 * k20 + 2.0 * k30 + k40);
    s.c1 += h / 6 * (k11 + 2.0 * k21 + 2.0 * k31 + k41);
    const double drift = std::abs(std::norm(s.c0) + std::norm(s.c1) - 1.0);
    s.norm_drift_max = std::max(s.norm_drift_max, drift);
    if (drift > 1e-8) {
      throw InstabilityError("two_level_propagate: norm drift " + std::to_string(drift) +
                             "; reduce the step");
    }
  }
  return s;
}

const char* to_string(Engine e) { return e == Engine::two_level ? "two-level" : "full"; }

double post_pulse_energy(const KickStrengths& kick, double sigma, Engine engine, int j_max) {
  const GaussianPulse pulse = propagator::pulse_for_kicks(kick, sigma);
  if (engine == Engine::two_level) return two_level_propagate(pulse).energy();
  if (kick.is_zero()) return 0.0;
  const int jm = j_max > 0 ? j_max : sudden::auto_j_max(kick);
  auto cfg = propagator::PropagatorConfig::defaults(jm, sigma);
  cfg.record_stride = propagator::PropagatorConfig::kRecordNone;
  const auto res = propagator::propagate(InitialState{}, pulse, cfg);
  return observables::kinetic_energy(res.final_state);
}

ResonanceScan resonance_scan(const KickStrengths& kick, double lo, double hi, int n, Engine engine,
                             const ScanOptions& opts) {
  kick.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("resonance_scan: need 0 < lo < hi");
  if (n < 50) throw InputError("resonance_scan: need at least 50 sigma points");

  ResonanceScan scan;
  scan.engine = engine;
  scan.kick = kick;
  const int jm = engine == Engine::full && opts.j_max <= 0 && !kick.is_zero() ? sudden::auto_j_max(kick)
                                                                               : opts.j_max;
  scan.sigmas.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    scan.sigmas[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
  }
  scan.sigmas.back() = hi;
  scan.energies.assign(scan.sigmas.size(), 0.0);
  parallel_for(scan.sigmas.size(), opts.workers, [&](std::size_t i) {
    scan.energies[i] = post_pulse_energy(kick, scan.sigmas[i], engine, jm);
  });

  const auto& e = scan.energies;
  const double e_max = *std::max_element(e.begin(), e.end());
  const double floor = opts.relative_floor * e_max;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  struct Candidate {
    std::size_t i;
    double flank;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 1; i + 1 < e.size(); ++i) {
    if (!(e[i] < e[i - 1] && e[i] < e[i + 1])) continue;
    std::size_t l = i, r = i;
    while (l > 0 && e[l - 1] >= e[l]) --l;
    while (r + 1 < e.size() && e[r + 1] >= e[r]) ++r;
    const double flank = std::min(e[l], e[r]);
    if (flank < floor || flank <= 0.0) continue;
    candidates.push_back({i, flank});
  }

  std::vector<std::optional<Resonance>> found(candidates.size());
  parallel_for(candidates.size(), opts.workers, [&](std::size_t c) {
    const std::size_t i = candidates[c].i;
    // Golden section on log E over log sigma.
    double a = std::log(scan.sigmas[i - 1]), b = std::log(scan.sigmas[i + 1]);
    auto f = [&](double ls) { return safe_log(post_pulse_energy(kick, std::exp(ls), engine, jm)); };
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (std::exp(b) - std::exp(a) > opts.refine_tolerance) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = f(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = f(x2);
      }
    }
    double sigma_r = scan.sigmas[i];
    double e_min = e[i];
    const double x_best = f1 < f2 ? x1 : x2;
    const double f_best = std::min(f1, f2);
    if (f_best < safe_log(e_min)) {
      sigma_r = std::exp(x_best);
      e_min = std::exp(f_best);
    }
    const double depth = std::log10(candidates[c].flank / std::max(e_min, 1e-300));
    if (depth >= opts.min_depth_decades) found[c] = Resonance{sigma_r, 0, e_min, depth};
  });

  for (const auto& r : found) {
    if (r) scan.resonances.push_back(*r);
  }
  std::sort(scan.resonances.begin(), scan.resonances.end(),
            [](const Resonance& x, const Resonance& y) { return x.sigma_r < y.sigma_r; });
  for (std::size_t k = 0; k < scan.resonances.size(); ++k) scan.resonances[k].order = static_cast<int>(k) + 1;
  return scan;
}

std::vector<ResonanceRow> resonance_map(double eta_lo, double eta_hi, int n_eta, double sigma_lo,
                                        double sigma_hi, int n_sigma, int workers) {
  if (n_eta <= 0) return {};
  if (!(eta_lo > 0.0) || eta_hi < eta_lo) throw InputError("resonance_map: need 0 < eta_lo <= eta_hi");
  const auto etas = observables::linspace(eta_lo, eta_hi, n_eta);
  std::vector<std::vector<ResonanceRow>> per_eta(etas.size());
  ScanOptions opts;
  opts.workers = 1;
  parallel_for(etas.size(), workers, [&](std::size_t k) {
    const auto scan =
        resonance_scan(KickStrengths{etas[k], 0.0}, sigma_lo, sigma_hi, n_sigma, Engine::two_level, opts);
    for (const auto& r : scan.resonances) per_eta[k].push_back({etas[k], r.sigma_r, r.order});
  });
  std::vector<ResonanceRow> rows;
  for (auto& v : per_eta) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

double oscillation_period(std::span<const ResonanceRow> rows, int order) {
  std::vector<std::pair<double, double>> series;
  for (const auto& r : rows) {
    if (r.order == order) series.emplace_back(r.p_eta, r.sigma_r);
  }
  std::sort(series.begin(), series.end());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (series.size() < 3) return nan;
  double lo = series[0].second, hi = series[0].second;
  for (const auto& p : series) {
    lo = std::min(lo, p.second);
    hi = std::max(hi, p.second);
  }
  const double min_prominence = 0.25 * (hi - lo);

  std::vector<double> peaks;
  const std::size_t n = series.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h = series[i].second;
    if (!(h > series[i - 1].second && h >= series[i + 1].second)) continue;
    // Prominence: height above the higher of the two valleys separating this
    // peak from taller ground. A side that runs into the end of the window
    // has no valley and is ignored unless both sides do.
    double left_min = h, right_min = h;
    bool left_open = true, right_open = true;
    for (std::size_t l = i; l-- > 0;) {
      if (series[l].second > h) {
        left_open = false;
        break;
      }
      left_min = std::min(left_min, series[l].second);
    }
    for (std::size_t r = i + 1; r < n; ++r) {
      if (series[r].second > h) {
        right_open = false;
        break;
      }
      right_min = std::min(right_min, series[r].second);
    }
    double base = std::max(left_min, right_min);
    if (left_open && !right_open) base = right_min;
    if (right_open && !left_open) base = left_min;
    if (left_open && right_open) base = std::min(left_min, right_min);
    if (h - base >= min_prominence) peaks.push_back(series[i].first);
  }
  if (peaks.size() < 2) return nan;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

double classical_kick_energy(const KickStrengths& kick, const specfun::QuadratureRule& rule) {
  kick.validate();
  if (rule.order() < 3) throw InputError("classical_kick_energy: rule order must be at least 3");
  return 0.5 * rule.integrate([&](double x) {
    const double v = kick.p_eta + 2.0 * kick.p_zeta * x;
    return (1.0 - x * x) * v * v;
  });
}

double j_bar_closed_form(const KickStrengths& kick) {
  kick.validate();
  const double pe = kick.p_eta, pz = kick.p_zeta;
  return 0.5 * (std::sqrt(8.0 / 3.0 * pe * pe + 32.0 / 15.0 * pz * pz + 1.0) - 1.0);
}

double j_bar_from_packet(const Wavepacket& wp) {
  return 0.5 * (std::sqrt(4.0 * observables::kinetic_energy(wp) + 1.0) - 1.0);
}

const char* to_string(Ray::Kind k) {
  switch (k) {
    case Ray::Kind::classical: return "classical";
    case Ray::Kind::reversed: return "reversed";
    case Ray::Kind::fractional: return "fractional";
    default: return "reversed-fractional";
  }
}

namespace {

// Segment of theta = a tau + b, tau in [t0, t1], inside [0, pi]^2.
std::optional<std::vector<std::pair<double, double>>> clip_line(double a, double b, double t0, double t1) {
  double lo = std::max(t0, 0.0), hi = std::min(t1, kPi);
  if (a != 0.0) {
    double ta = -b / a, tb = (kPi - b) / a;
    if (ta > tb) std::swap(ta, tb);
    lo = std::max(lo, ta);
    hi = std::min(hi, tb);
  } else if (b < 0.0 || b > kPi) {
    return std::nullopt;
  }
  if (!(hi > lo)) return std::nullopt;
  auto theta = [&](double t) { return std::clamp(a * t + b, 0.0, kPi); };
  return std::vector<std::pair<double, double>>{{lo, theta(lo)}, {hi, theta(hi)}};
}

}  // namespace

RaySet ray_set(const Wavepacket& wp, const KickStrengths& kick, int beta_max, std::span<const double> fractions) {
  kick.validate();
  if (kick.is_zero()) throw InputError("ray_set: no focusing time for a zero kick");
  if (beta_max < 0) throw InputError("ray_set: beta_max must be non-negative");
  for (double nu : fractions) {
    if (!(nu > 0.0)) throw InputError("ray_set: fractions must be positive");
  }

  RaySet out;
  out.j_bar = j_bar_closed_form(kick);
  out.j_bar_rounded = static_cast<int>(std::lround(out.j_bar));
  out.tau_cl = kPi / (2.0 * out.j_bar_rounded + 1.0);
  out.tau_f = 1.0 / (2.0 * kick.p_eta + 4.0 * kick.p_zeta);

  if (kick.p_zeta == 0.0) {
    out.tau_rf = out.tau_rf_lo = out.tau_rf_hi = kPi - out.tau_f;
  } else {
    const int n = 2001;
    const auto taus = observables::linspace(0.8 * kPi, kPi, n);
    std::size_t best = 1;
    double best_d = -1.0;
    for (std::size_t i = 1; i + 1 < taus.size(); ++i) {
      const double d = observables::density_at(wp, kPi, taus[i]);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    out.tau_rf = taus[best];
    out.tau_rf_lo = taus[best - 1];
    out.tau_rf_hi = taus[best + 1];
    out.tau_rf_approximate = true;
  }

  const double s = kPi / out.tau_cl;
  auto emit = [&](Ray::Kind kind, int beta, double nu, double a, double b, double t0, double t1) {
    if (auto pts = clip_line(a, b, t0, t1)) out.rays.push_back(Ray{kind, beta, nu, std::move(*pts)});
  };
  for (int beta = 0; beta <= beta_max; ++beta) {
    const double t0 = out.tau_f + beta * out.tau_cl, t1 = t0 + out.tau_cl;
    if (beta % 2 == 0) {
      emit(Ray::Kind::classical, beta, 0.0, s, -s * out.tau_f - beta * kPi, t0, t1);
    } else {
      emit(Ray::Kind::classical, beta, 0.0, -s, s * out.tau_f + (beta + 1) * kPi, t0, t1);
    }
    const double r1 = out.tau_rf - beta * out.tau_cl, r0 = r1 - out.tau_cl;
    if (beta % 2 == 0) {
      emit(Ray::Kind::reversed, beta, 0.0, s, -s * out.tau_rf + (beta + 1) * kPi, r0, r1);
    } else {
      emit(Ray::Kind::reversed, beta, 0.0, -s, s * out.tau_rf - beta * kPi, r0, r1);
    }
  }
  for (double nu : fractions) {
    emit(Ray::Kind::fractional, -1, nu, 1.0 / nu, -out.tau_f / nu, out.tau_f, kPi);
    emit(Ray::Kind::reversed_fractional, -1, nu, 1.0 / nu, kPi - out.tau_rf / nu, 0.0, out.tau_rf);
  }
  return out;
}

}  // namespace rotorkick::reduced

#include "rotorkick/propagator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "rotorkick/errors.hpp"

namespace rotorkick::propagator {

namespace {

using Eigen::MatrixXd;

MatrixXd transform_matrix(const specfun::QuadratureRule& rule, int j_max) {
  const int n_grid = rule.order();
  MatrixXd t(n_grid, j_max + 1);
  std::vector<double> p(static_cast<std::size_t>(j_max + 1));
  for (int n = 0; n < n_grid; ++n) {
    specfun::legendre_table(rule.nodes()[n], p);
    const double sw = std::sqrt(rule.weights()[n]);
    for (int j = 0; j <= j_max; ++j) t(n, j) = sw * std::sqrt((2.0 * j + 1.0) / 2.0) * p[j];
  }
  return t;
}

double kinetic(const MatrixXd& c) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < c.rows(); ++j) s += Wavepacket::energy(static_cast<int>(j)) * c.row(j).squaredNorm();
  return s;
}

}  // namespace

PropagatorConfig PropagatorConfig::defaults(int j_max, double sigma) {
  if (j_max < 0) throw InputError("propagator: negative j_max");
  if (!(sigma > 0.0)) throw InputError("propagator: sigma must be positive");
  PropagatorConfig cfg;
  cfg.j_max = j_max;
  const double e_max = Wavepacket::energy(j_max);
  cfg.dt = e_max > 0.0 ? std::min(sigma / 100.0, 0.25 / e_max) : sigma / 100.0;
  cfg.rule = specfun::gauss_legendre(2 * j_max + 2);
  const double steps = std::ceil(GaussianPulse::kWindowFactor * sigma / cfg.dt);
  cfg.record_stride = static_cast<int>(std::max(1.0, std::floor(steps / 1000.0)));
  return cfg;
}

void PropagatorConfig::validate(double sigma) const {
  if (j_max < 0) throw InputError("propagator: negative j_max");
  if (rule.order() < 2 * j_max + 2) {
    throw InputError("propagator: quadrature order " + std::to_string(rule.order()) +
                     " below 2 j_max + 2 = " + std::to_string(2 * j_max + 2));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("propagator: dt must be positive");
  const double e_max = Wavepacket::energy(j_max);
  double bound = sigma / 50.0;
  if (e_max > 0.0) bound = std::min(bound, 0.5 / e_max);
  if (dt > bound * (1.0 + 1e-12)) {
    throw InputError("propagator: dt " + std::to_string(dt) + " above min(sigma/50, 0.5/E_jmax) = " +
                     std::to_string(bound));
  }
  if (record_stride < 1) throw InputError("propagator: record_stride must be >= 1");
}

KickStrengths kick_strengths_of(const GaussianPulse& pulse) {
  pulse.validate();
  const double s = pulse.sigma;
  return {pulse.eta0 * std::erf(pulse.tau0 / (2.0 * std::sqrt(2.0) * s)),
          pulse.zeta0 * std::erf(pulse.tau0 / (2.0 * s)) / (2.0 * std::sqrt(specfun::kPi) * s)};
}

GaussianPulse pulse_for_kicks(const KickStrengths& target, double sigma) {
  target.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("pulse_for_kicks: sigma must be positive");
  const double tau0 = GaussianPulse::kWindowFactor * sigma;
  return GaussianPulse::with_default_window(
      target.p_eta / std::erf(tau0 / (2.0 * std::sqrt(2.0) * sigma)),
      2.0 * std::sqrt(specfun::kPi) * sigma * target.p_zeta / std::erf(tau0 / (2.0 * sigma)), sigma);
}

std::vector<cplx> fbr_dvr_transform(std::span<const cplx> in, const specfun::QuadratureRule& rule,
                                    int j_max, Direction direction) {
  if (j_max < 0) throw InputError("fbr_dvr_transform: negative j_max");
  const std::size_t n_fbr = static_cast<std::size_t>(j_max + 1);
  const std::size_t n_dvr = static_cast<std::size_t>(rule.order());
  const std::size_t expected = direction == Direction::forward ? n_fbr : n_dvr;
  if (in.size() != expected) {
    throw InputError("fbr_dvr_transform: input has " + std::to_string(in.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  const MatrixXd t = transform_matrix(rule, j_max);
  const Eigen::Map<const Eigen::VectorXcd> v(in.data(), static_cast<Eigen::Index>(in.size()));
  Eigen::VectorXcd r = direction == Direction::forward ? Eigen::VectorXcd(t.cast<cplx>() * v)
                                                       : Eigen::VectorXcd(t.transpose().cast<cplx>() * v);
  return {r.data(), r.data() + r.size()};
}

PropagationResult propagate(const InitialState& init, const GaussianPulse& pulse,
                            const PropagatorConfig& cfg) {
  init.validate();
  pulse.validate();
  cfg.validate(pulse.sigma);
  if (init.m0 != 0) throw InputError("propagate: only m0 = 0 is supported");
  if (init.j0 > cfg.j_max) throw InputError("propagate: j0 above j_max");

  const int nb = cfg.j_max + 1;
  const long n_steps = static_cast<long>(std::ceil(pulse.tau0 / cfg.dt - 1e-9));
  const double dt = pulse.tau0 / static_cast<double>(n_steps);

  const MatrixXd t = transform_matrix(cfg.rule, cfg.j_max);
  const MatrixXd tt = t.transpose();
  const auto nodes = cfg.rule.nodes();
  const Eigen::Index n_grid = t.rows();

  // Columns hold real and imaginary parts.
  MatrixXd c = MatrixXd::Zero(nb, 2);
  c(init.j0, 0) = 1.0;
  MatrixXd g(n_grid, 2);

  std::vector<double> half_c(nb), half_s(nb);
  for (int j = 0; j < nb; ++j) {
    const double ph = -Wavepacket::energy(j) * dt / 2.0;
    half_c[j] = std::cos(ph);
    half_s[j] = std::sin(ph);
  }
  auto rotate = [&](const std::vector<double>& cs, const std::vector<double>& sn) {
    for (int j = 0; j < nb; ++j) {
      const double re = c(j, 0), im = c(j, 1);
      c(j, 0) = cs[j] * re - sn[j] * im;
      c(j, 1) = sn[j] * re + cs[j] * im;
    }
  };

  long pending_free = 0;
  std::vector<double> free_c(nb), free_s(nb);
  auto flush = [&] {
    if (pending_free == 0) return;
    for (int j = 0; j < nb; ++j) {
      const double ph = -Wavepacket::energy(j) * dt * static_cast<double>(pending_free);
      free_c[j] = std::cos(ph);
      free_s[j] = std::sin(ph);
    }
    rotate(free_c, free_s);
    pending_free = 0;
  };

  PropagationResult res{Wavepacket::identity(init, cfg.j_max), {}, {}, 0.0, n_steps, 0, dt};
  auto record = [&](double tau) {
    Snapshot s;
    s.tau = tau;
    s.coeffs.resize(static_cast<std::size_t>(nb));
    for (int j = 0; j < nb; ++j) s.coeffs[j] = cplx(c(j, 0), c(j, 1));
    res.trajectory.push_back(std::move(s));
    res.kinetic_series.emplace_back(tau, kinetic(c));
  };
  auto check_norm = [&](double tau) {
    const double defect = std::abs(c.squaredNorm() - 1.0);
    res.norm_defect_max = std::max(res.norm_defect_max, defect);
    if (defect > kInstabilityThreshold) {
      throw InstabilityError("propagate: norm defect " + std::to_string(defect) + " at tau=" +
                             std::to_string(tau) + "; reduce dt or raise the quadrature order");
    }
  };

  record(0.0);
  const double centre = pulse.tau0 / 2.0;
  const double half_width = pulse.active_half_width(kFreeStepThreshold / dt);
  for (long k = 0; k < n_steps; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * dt;
    if (std::abs(mid - centre) > half_width) {
      ++pending_free;
    } else {
      flush();
      const double eta = pulse.eta(mid), zeta = pulse.zeta(mid);
      rotate(half_c, half_s);
      g.noalias() = t * c;
      for (Eigen::Index n = 0; n < n_grid; ++n) {
        const double x = nodes[static_cast<std::size_t>(n)];
        const double ph = (eta * x + zeta * x * x) * dt;
        const double cs = std::cos(ph), sn = std::sin(ph);
        const double re = g(n, 0), im = g(n, 1);
        g(n, 0) = cs * re - sn * im;
        g(n, 1) = sn * re + cs * im;
      }
      c.noalias() = tt * g;
      rotate(half_c, half_s);
      ++res.active_steps;
      check_norm(mid);
    }
    const long done = k + 1;
    if (done == n_steps || (cfg.record_stride != PropagatorConfig::kRecordNone && done % cfg.record_stride == 0)) {
      flush();
      const double tau = done == n_steps ? pulse.tau0 : static_cast<double>(done) * dt;
      check_norm(tau);
      record(tau);
    }
  }

  std::vector<cplx> fin(static_cast<std::size_t>(nb));
  for (int j = 0; j < nb; ++j) fin[j] = cplx(c(j, 0), c(j, 1));
  Provenance meta;
  meta.origin = "propagated";
  meta.init = init;
  meta.pulse = pulse;
  meta.kick = kick_strengths_of(pulse);
  meta.settings = "split-operator j_max=" + std::to_string(cfg.j_max) + " dt=" + std::to_string(dt) +
                  " order=" + std::to_string(cfg.rule.order());
  res.final_state = Wavepacket(0, std::move(fin), std::move(meta));
  return res;
}

}  // namespace rotorkick::propagator

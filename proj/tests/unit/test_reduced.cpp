#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rotorkick/errors.hpp"
#include "rotorkick/observables.hpp"
#include "rotorkick/propagator.hpp"
#include "rotorkick/reduced.hpp"
#include "rotorkick/specfun.hpp"
#include "rotorkick/sudden.hpp"

using namespace rotorkick;
using namespace rotorkick::reduced;
using specfun::kPi;

TEST_CASE("two-level model without coupling") {
  const TwoLevelState s = two_level_propagate(GaussianPulse::with_default_window(0.0, 3.0, 1.0));
  CHECK(s.c0 == cplx(1.0, 0.0));
  CHECK(s.c1 == cplx(0.0, 0.0));
  CHECK(s.energy() == 0.0);
}

TEST_CASE("two-level sudden limit is a Rabi rotation") {
  // In the delta limit c1 = i sin(P / sqrt 3).
  for (double pe : {0.5, 1.5, 3.0}) {
    const TwoLevelState s = two_level_propagate(propagator::pulse_for_kicks({pe, 0.0}, 0.001));
    const double ref = 2.0 * std::pow(std::sin(pe / std::sqrt(3.0)), 2);
    CAPTURE(pe);
    CHECK(std::abs(s.energy() - ref) < 1e-5 * std::max(ref, 1.0));
  }
}

TEST_CASE("two-level norm is conserved") {
  for (double sigma : {0.001, 0.1, 1.0, 1.847, 5.0, 10.0}) {
    for (double pe : {0.5, 1.5, 6.0, 12.0}) {
      const TwoLevelState s = two_level_propagate(propagator::pulse_for_kicks({pe, 0.0}, sigma));
      CHECK(s.norm_drift_max < 1e-10);
      CHECK(std::abs(std::norm(s.c0) + std::norm(s.c1) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("two-level step refinement") {
  const GaussianPulse p = propagator::pulse_for_kicks({1.5, 0.0}, 0.8);
  const double e1 = two_level_propagate(p).energy();
  const double e2 = two_level_propagate(p, 0.8 / 4000.0).energy();
  CHECK(std::abs(e1 - e2) < 1e-9 * e2);
}

TEST_CASE("two-level and full engines share the resonance structure") {
  for (double pe : {1.0, 1.5, 2.0}) {
    CAPTURE(pe);
    const KickStrengths k{pe, 0.0};
    ScanOptions opts;
    opts.j_max = 16;
    const ResonanceScan two = resonance_scan(k, 1.0, 3.0, 50, Engine::two_level, opts);
    const ResonanceScan full = resonance_scan(k, 1.0, 3.0, 50, Engine::full, opts);
    REQUIRE(two.resonances.size() == 1);
    REQUIRE(full.resonances.size() == 1);
    CHECK(two.resonances[0].sigma_r == doctest::Approx(full.resonances[0].sigma_r).epsilon(0.05));
    // Adiabatic side: same magnitude.
    const double a = post_pulse_energy(k, 3.0, Engine::two_level);
    const double b = post_pulse_energy(k, 3.0, Engine::full, 16);
    CHECK(a / b < 2.0);
    CHECK(a / b > 0.5);
  }
}

TEST_CASE("two-level versus full, stated tolerances" * doctest::test_suite("two-level-vs-full")) {
  // Near the resonance: within a factor of 2. Adiabatic end: within 20%.
  for (double pe : {1.0, 1.5, 2.0}) {
    CAPTURE(pe);
    const KickStrengths k{pe, 0.0};
    for (double sigma : {1.0, 1.5, 2.0, 2.5}) {
      CAPTURE(sigma);
      const double a = post_pulse_energy(k, sigma, Engine::two_level);
      const double b = post_pulse_energy(k, sigma, Engine::full, 16);
      CHECK(a / b < 2.0);
      CHECK(a / b > 0.5);
    }
    const double a = post_pulse_energy(k, 3.0, Engine::two_level);
    const double b = post_pulse_energy(k, 3.0, Engine::full, 16);
    CHECK(std::abs(a - b) <= 0.2 * b);
  }
}

TEST_CASE("resonance at P_eta = 1.5") {
  ScanOptions opts;
  opts.j_max = 16;
  const ResonanceScan full = resonance_scan({1.5, 0.0}, 1.0, 3.0, 50, Engine::full, opts);
  REQUIRE(full.resonances.size() == 1);
  const Resonance& r = full.resonances[0];
  CHECK(std::abs(r.sigma_r - 1.847) < 0.01);
  CHECK(r.order == 1);
  CHECK(r.depth_decades >= 2.5);
  CHECK(full.engine == Engine::full);
  CHECK(full.sigmas.size() == 50);
  CHECK(full.sigmas.front() == 1.0);
  CHECK(full.sigmas.back() == 3.0);
  for (std::size_t i = 1; i < full.sigmas.size(); ++i) {
    CHECK(full.sigmas[i] / full.sigmas[i - 1] == doctest::Approx(std::pow(3.0, 1.0 / 49.0)));
  }
}

TEST_CASE("sudden end of a scan plateaus at the kick value") {
  const double e = post_pulse_energy({1.5, 0.0}, 0.001, Engine::full);
  CHECK(e == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("zero kick scans are flat") {
  for (Engine eng : {Engine::two_level, Engine::full}) {
    const ResonanceScan s = resonance_scan({0.0, 0.0}, 0.1, 10.0, 50, eng);
    CHECK(s.resonances.empty());
    for (double e : s.energies) CHECK(e == 0.0);
  }
  CHECK_THROWS_AS(resonance_scan({1.0, 0.0}, 0.0, 1.0, 50, Engine::two_level), InputError);
  CHECK_THROWS_AS(resonance_scan({1.0, 0.0}, 2.0, 1.0, 50, Engine::two_level), InputError);
  CHECK_THROWS_AS(resonance_scan({1.0, 0.0}, 0.1, 1.0, 49, Engine::two_level), InputError);
}

TEST_CASE("resonance ordering and worker independence") {
  ScanOptions one, many;
  one.workers = 1;
  many.workers = 4;
  const ResonanceScan a = resonance_scan({6.0, 0.0}, 0.1, 10.0, 80, Engine::two_level, one);
  const ResonanceScan b = resonance_scan({6.0, 0.0}, 0.1, 10.0, 80, Engine::two_level, many);
  CHECK(a.energies == b.energies);
  REQUIRE(a.resonances.size() == b.resonances.size());
  REQUIRE(!a.resonances.empty());
  for (std::size_t i = 0; i < a.resonances.size(); ++i) {
    CHECK(a.resonances[i].sigma_r == b.resonances[i].sigma_r);
    CHECK(a.resonances[i].order == static_cast<int>(i) + 1);
    CHECK(a.resonances[i].depth_decades >= 2.0);
    if (i > 0) CHECK(a.resonances[i].sigma_r > a.resonances[i - 1].sigma_r);
  }
}

TEST_CASE("resonance map") {
  CHECK(resonance_map(1.0, 2.0, 0, 0.1, 10.0).empty());
  const auto rows = resonance_map(1.5, 1.5, 1, 0.1, 10.0);
  REQUIRE(!rows.empty());
  CHECK(rows[0].p_eta == 1.5);
  CHECK(rows[0].order == 1);
  CHECK(rows[0].sigma_r == doctest::Approx(1.847).epsilon(0.05));
  CHECK_THROWS_AS(resonance_map(0.0, 2.0, 3, 0.1, 10.0), InputError);
}

TEST_CASE("oscillation period of a synthetic sawtooth") {
  std::vector<ResonanceRow> rows;
  for (int i = 0; i < 200; ++i) {
    const double p = 0.5 + 11.5 * i / 199.0;
    rows.push_back({p, 2.0 + std::fmod(p, 5.5), 1});
    rows.push_back({p, 9.0, 2});
  }
  CHECK(oscillation_period(rows, 1) == doctest::Approx(5.5).epsilon(0.02));
  CHECK(std::isnan(oscillation_period(rows, 2)));
  CHECK(std::isnan(oscillation_period(rows, 3)));

  // Falling ramps that jump back up, last peak close to the window end.
  std::vector<ResonanceRow> falling;
  for (int i = 0; i < 50; ++i) {
    const double p = 0.5 + 11.5 * i / 49.0;
    falling.push_back({p, 3.0 - 0.5 * std::fmod(p, 5.5), 1});
  }
  CHECK(oscillation_period(falling, 1) == doctest::Approx(5.5).epsilon(0.05));
}

TEST_CASE("classical kick energy matches the quantum one") {
  const auto rule = specfun::gauss_legendre(8);
  CHECK(classical_kick_energy({0.0, 0.0}, rule) == 0.0);
  CHECK(classical_kick_energy({1.5, 0.0}, rule) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(classical_kick_energy({1.5, 1.5}, rule) == doctest::Approx(2.7).epsilon(1e-14));
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      const KickStrengths k{2.5 * a, 2.5 * b};
      if (k.is_zero()) continue;
      const double q = observables::kinetic_energy(sudden::delta_kick({}, k));
      CHECK(std::abs(classical_kick_energy(k, rule) - q) <= 1e-7 * q);
    }
  }
  CHECK_THROWS_AS(classical_kick_energy({1.0, 0.0}, specfun::gauss_legendre(2)), InputError);
}

TEST_CASE("mean angular momentum") {
  CHECK(std::abs(j_bar_closed_form({8.0, 0.0}) - 6.0511) < 5e-4);
  CHECK(std::abs(j_bar_closed_form({8.0, 8.0}) - 8.2778) < 5e-4);
  CHECK(j_bar_closed_form({0.0, 0.0}) == 0.0);
  for (const KickStrengths& k : {KickStrengths{8.0, 0.0}, KickStrengths{8.0, 8.0}, KickStrengths{1.5, 2.8}}) {
    CHECK(std::abs(j_bar_from_packet(sudden::delta_kick({}, k)) - j_bar_closed_form(k)) < 1e-9);
  }
}

TEST_CASE("rays for a purely orienting kick") {
  const KickStrengths k{8.0, 0.0};
  const Wavepacket wp = sudden::delta_kick({}, k);
  const std::vector<double> nus{1.0, 0.5, 0.25};
  const RaySet rs = ray_set(wp, k, 12, nus);
  CHECK(rs.j_bar_rounded == 6);
  CHECK(rs.tau_cl == doctest::Approx(kPi / 13.0));
  CHECK(rs.tau_f == doctest::Approx(0.0625));
  CHECK(rs.tau_rf == doctest::Approx(kPi - 0.0625));
  CHECK(!rs.tau_rf_approximate);

  const double slope = kPi / rs.tau_cl;
  std::vector<const Ray*> classical;
  for (const Ray& r : rs.rays) {
    REQUIRE(r.points.size() >= 2);
    for (auto [t, th] : r.points) {
      CHECK(t >= 0.0);
      CHECK(t <= kPi + 1e-12);
      CHECK(th >= 0.0);
      CHECK(th <= kPi);
    }
    const auto [t0, th0] = r.points.front();
    const auto [t1, th1] = r.points.back();
    if (r.kind == Ray::Kind::classical || r.kind == Ray::Kind::reversed) {
      CHECK(std::abs((th1 - th0) / (t1 - t0)) == doctest::Approx(slope));
    } else {
      CHECK((th1 - th0) / (t1 - t0) == doctest::Approx(1.0 / r.nu));
    }
    if (r.kind == Ray::Kind::classical) classical.push_back(&r);
  }
  // Classical rays bounce: each starts where the previous one reflected.
  REQUIRE(classical.size() >= 12);
  for (std::size_t i = 0; i < classical.size(); ++i) {
    const Ray& r = *classical[i];
    CHECK(r.beta == static_cast<int>(i));
    const double start = r.beta % 2 == 0 ? 0.0 : kPi;
    CHECK(r.points.front().second == doctest::Approx(start));
    CHECK(r.points.front().first == doctest::Approx(rs.tau_f + r.beta * rs.tau_cl));
    if (r.points.back().first < kPi - 1e-9) CHECK(r.points.back().second == doctest::Approx(kPi - start));
    if (i > 0) {
      CHECK(r.points.front().first == doctest::Approx(classical[i - 1]->points.back().first));
      CHECK(r.points.front().second == doctest::Approx(classical[i - 1]->points.back().second));
    }
  }
  // The reversed family lands on theta = pi at tau_rf.
  bool lands = false;
  for (const Ray& r : rs.rays) {
    if (r.kind == Ray::Kind::reversed && r.beta == 0) {
      lands = std::abs(r.points.back().first - rs.tau_rf) < 1e-12 && std::abs(r.points.back().second - kPi) < 1e-12;
    }
  }
  CHECK(lands);
  CHECK(std::string(to_string(Ray::Kind::reversed_fractional)) == "reversed-fractional");
}

TEST_CASE("rays for a combined kick") {
  const KickStrengths k{8.0, 8.0};
  const Wavepacket wp = sudden::delta_kick({}, k);
  const RaySet rs = ray_set(wp, k, 16, std::vector<double>{0.5});
  CHECK(rs.j_bar_rounded == 8);
  CHECK(rs.tau_f == doctest::Approx(1.0 / 48.0));
  CHECK(rs.tau_rf_approximate);
  CHECK(rs.tau_rf_lo < rs.tau_rf);
  CHECK(rs.tau_rf < rs.tau_rf_hi);
  CHECK(rs.tau_rf >= 0.8 * kPi);
  CHECK(rs.tau_rf < kPi);
  const double here = observables::density_at(wp, kPi, rs.tau_rf);
  CHECK(here >= observables::density_at(wp, kPi, rs.tau_rf_lo));
  CHECK(here >= observables::density_at(wp, kPi, rs.tau_rf_hi));
}

TEST_CASE("ray_set input errors") {
  const Wavepacket wp = Wavepacket::identity({}, 4);
  CHECK_THROWS_AS(ray_set(wp, {0.0, 0.0}, 3, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(ray_set(wp, {1.0, 0.0}, -1, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(ray_set(wp, {1.0, 0.0}, 3, std::vector<double>{0.0}), InputError);
}

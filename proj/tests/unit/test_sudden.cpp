#include <doctest.h>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "rotorkick/errors.hpp"
#include "rotorkick/observables.hpp"
#include "rotorkick/specfun.hpp"
#include "rotorkick/sudden.hpp"

using namespace rotorkick;
using namespace rotorkick::sudden;

namespace {

struct Frozen {
  int j;
  cplx c;
};

// tests/oracles/freeze_values.py, 30-digit overlap integrals.
const std::vector<Frozen> kGround = {
    {0, {0.47789309678169466, 0.27420387487512349}},
    {1, {-0.51240920146807314, -0.023864199725974562}},
    {2, {-0.4185532807005635, 0.031961620131495856}},
    {3, {0.035376454312886156, -0.42831843767682923}},
    {4, {0.10050548622722123, -0.17141381345105529}},
    {5, {0.16114983203738804, 0.030764886465651888}},
    {6, {0.040257394650366496, 0.049191782318462802}},
    {7, {-0.012420545856142007, 0.038867776234563647}},
    {8, {-0.013068672327336893, 0.0063340358724195851}},
};
const std::vector<Frozen> kJ1 = {
    {0, {-0.51240920146807314, -0.023864199725974562}},
    {1, {0.10352766164089035, 0.30279121698914369}},
    {2, {-0.42724122680145318, -0.39754118424298185}},
    {3, {-0.27989117880508779, -0.12155003023828893}},
    {4, {0.1711420259903666, -0.34708958666763699}},
    {5, {0.12246441319057553, -0.10644654486992333}},
    {6, {0.12926291596955711, 0.06048284904085164}},
    {7, {0.02361323454077382, 0.048206608853459645}},
    {8, {-0.016730573681387896, 0.030978682689967641}},
};
const std::vector<Frozen> kJ2M1 = {
    {1, {-0.4148495972737045, 0.19871196036689249}},
    {2, {0.28675944924442384, 0.38236439045930515}},
    {3, {-0.51364773311629472, -0.12853704909382628}},
    {4, {-0.33637854889360123, -0.032637108053768511}},
    {5, {0.055346927715420206, -0.34590480030187456}},
    {6, {0.087611530044946535, -0.12658728664098908}},
    {7, {0.12192352798801729, 0.028294319152235904}},
    {8, {0.028748252701342412, 0.037982677711623389}},
};
const std::vector<Frozen> kJ3M2 = {
    {2, {-0.13950773654872659, 0.19455629670470276}},
    {3, {0.70290144237287226, 0.48967664144551744}},
    {4, {-0.24227953411505503, 0.14635477301841329}},
    {5, {-0.24807534482025629, 0.21797232607181413}},
    {6, {-0.063870340786692558, -0.097079733008758668}},
    {7, {-0.036949272662557841, -0.063024940395162966}},
    {8, {0.022035357142259727, -0.013631786265166484}},
};

void check_frozen(const Wavepacket& wp, const std::vector<Frozen>& ref) {
  for (const auto& [j, c] : ref) {
    CAPTURE(j);
    CHECK(std::abs(wp.coeff(j) - c) < 1e-12);
  }
}

std::vector<KickStrengths> random_kicks(int n, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<KickStrengths> out;
  for (int i = 0; i < n; ++i) out.push_back({u(rng), u(rng)});
  return out;
}

}  // namespace

TEST_CASE("zero kick has the trivial phase expansion") {
  const auto s = phase_coeffs_series({0.0, 0.0}, 10);
  const auto q = phase_coeffs_quadrature({0.0, 0.0}, 10, specfun::gauss_legendre(32));
  CHECK(s.c[0] == cplx(1.0, 0.0));
  CHECK(std::abs(q.c[0] - 1.0) < 1e-15);
  for (int j = 1; j <= 10; ++j) {
    CHECK(s.c[j] == cplx{});
    CHECK(std::abs(q.c[j]) < 1e-14);
  }
}

TEST_CASE("series and quadrature agree on random kicks") {
  for (const auto& k : random_kicks(25, 10.0, 20240611)) {
    CAPTURE(k.p_eta);
    CAPTURE(k.p_zeta);
    const auto s = phase_coeffs_series(k, kSeriesMaxJPrime);
    const auto q = phase_coeffs_quadrature(k, kSeriesMaxJPrime);
    for (int j = 0; j <= kSeriesMaxJPrime; ++j) CHECK(std::abs(s.c[j] - q.c[j]) < 1e-10);
    CHECK(s.truncation_estimate < 1e-12);
  }
}

TEST_CASE("series truncation scale at (8, 8)") {
  const auto s = phase_coeffs_series({8.0, 8.0}, 50, 80);
  // Last shell expressed in state-coefficient units, C = c / sqrt(2J'+1).
  const double last = s.last_shell[50] / std::sqrt(101.0);
  const Wavepacket wp = kick_wavepacket({}, s, 50);
  const double c50 = std::abs(wp.coeff(50));
  CHECK(std::abs(std::log10(last) - (-30.0)) <= 2.0);
  CHECK(std::abs(std::log10(c50) - (-15.0)) <= 2.0);
  CHECK(last < 1e-12 * c50);
}

TEST_CASE("phase expansion reconstructs the kick factor") {
  const KickStrengths k{1.5, 2.8};
  for (const auto& pe : {phase_coeffs_quadrature(k, 40), phase_coeffs_series(k, 40)}) {
    for (int i = 0; i < 64; ++i) {
      const double x = -1.0 + (i + 0.5) * 2.0 / 64.0;
      CHECK(std::abs(pe.evaluate(x) - std::polar(1.0, k.p_eta * x + k.p_zeta * x * x)) < 1e-9);
    }
  }
}

TEST_CASE("quadrature coefficients follow the plane-wave expansion") {
  const auto q = phase_coeffs_quadrature({1.5, 0.0}, 20);
  const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int j = 0; j <= 20; ++j) {
    const cplx ref = (2.0 * j + 1.0) * ipow[j % 4] * specfun::sph_bessel_j(j, 1.5);
    CHECK(std::abs(q.c[j] - ref) < 1e-13);
  }
  CHECK(std::abs(q.c[1] - cplx(0.0, 3.0 * specfun::sph_bessel_j(1, 1.5))) < 1e-14);
}

TEST_CASE("closed forms match the general path") {
  for (double p : {0.0, 0.5, 1.5, 2.8, 8.0}) {
    CAPTURE(p);
    const int jm = 50;
    const Wavepacket o = orienting_closed_form(p, jm);
    const Wavepacket a = aligning_closed_form(p, jm);
    const Wavepacket go = kick_wavepacket({}, phase_coeffs_quadrature({p, 0.0}, jm), jm);
    const Wavepacket ga = kick_wavepacket({}, phase_coeffs_quadrature({0.0, p}, jm), jm);
    for (int j = 0; j <= jm; ++j) {
      CHECK(std::abs(o.coeff(j) - go.coeff(j)) < 1e-9);
      CHECK(std::abs(a.coeff(j) - ga.coeff(j)) < 1e-9);
    }
    CHECK(o.norm_defect() < 1e-12);
    CHECK(a.norm_defect() < 1e-12);
  }
}

TEST_CASE("closed-form landmarks") {
  const Wavepacket o = orienting_closed_form(1.5, 30);
  const double j0 = std::sin(1.5) / 1.5;
  CHECK(o.population(0) == doctest::Approx(j0 * j0).epsilon(1e-14));
  CHECK(o.population(0) == doctest::Approx(0.44222).epsilon(1e-4));
  CHECK(std::abs(o.population(0) - o.population(1)) < 0.05);

  const Wavepacket a = aligning_closed_form(2.8, 30);
  CHECK(std::abs(a.population(0) - a.population(2)) < 0.05);
  for (int j = 1; j <= 29; j += 2) CHECK(a.coeff(j) == cplx{});

  CHECK(orienting_closed_form(0.0, 5).coeff(0) == cplx(1.0, 0.0));
  CHECK(aligning_closed_form(0.0, 5).coeff(0) == cplx(1.0, 0.0));
}

TEST_CASE("kick_wavepacket landmarks") {
  const Wavepacket z = kick_wavepacket({}, phase_coeffs_quadrature({0.0, 0.0}, 10), 10);
  CHECK(std::abs(z.coeff(0) - 1.0) < 1e-15);
  for (int j = 1; j <= 10; ++j) CHECK(std::abs(z.coeff(j)) < 1e-15);

  const Wavepacket w = delta_kick({}, {1.5, 1.5});
  CHECK(w.population(0) >= 0.35);
  CHECK(w.population(0) <= 0.45);
  CHECK(w.population(1) >= 0.35);
  CHECK(w.population(1) <= 0.45);
}

TEST_CASE("unitarity over the kick domain") {
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b <= 10; ++b) {
      const KickStrengths k{double(a), double(b)};
      const Wavepacket wp = kick_wavepacket({}, phase_coeffs_quadrature(k, 50), 50);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(wp.norm_defect() < 1e-9);
    }
  }
}

TEST_CASE("pure aligning kicks leave odd J exactly empty") {
  for (double pz : {0.3, 2.8, 9.7}) {
    const auto q = phase_coeffs_quadrature({0.0, pz}, 40);
    const auto s = phase_coeffs_series({0.0, pz}, 40);
    const Wavepacket wp = delta_kick({}, {0.0, pz}, 40);
    for (int j = 1; j <= 39; j += 2) {
      CHECK(q.c[j] == cplx{});
      CHECK(s.c[j] == cplx{});
      CHECK(wp.coeff(j) == cplx{});
    }
  }
  // From an odd initial state the surviving states are odd.
  const Wavepacket odd = delta_kick({1, 0}, {0.0, 2.0}, 30);
  for (int j = 0; j <= 30; j += 2) CHECK(odd.coeff(j) == cplx{});
}

TEST_CASE("kinetic energy closed form") {
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      const KickStrengths k{10.0 * a / 9.0, 10.0 * b / 9.0};
      if (k.is_zero()) continue;
      const double ref = 2.0 / 3.0 * k.p_eta * k.p_eta + 8.0 / 15.0 * k.p_zeta * k.p_zeta;
      const double e = observables::kinetic_energy(delta_kick({}, k));
      CAPTURE(k.p_eta);
      CAPTURE(k.p_zeta);
      CHECK(std::abs(e - ref) <= 1e-7 * ref);
    }
  }
}

TEST_CASE("frozen coefficients") {
  const KickStrengths k{1.5, 2.8};
  check_frozen(delta_kick({0, 0}, k, 40), kGround);
  check_frozen(delta_kick({1, 0}, k, 40), kJ1);
  check_frozen(delta_kick({2, 1}, k, 40), kJ2M1);
  check_frozen(delta_kick({3, -2}, {0.7, 1.9}, 40), kJ3M2);
  check_frozen(delta_kick({3, 2}, {0.7, 1.9}, 40), kJ3M2);
  // The series path reaches the same states.
  check_frozen(kick_wavepacket({1, 0}, phase_coeffs_series(k, 41), 40), kJ1);
}

TEST_CASE("general initial states") {
  for (int j0 = 0; j0 <= 3; ++j0) {
    for (int m0 = -j0; m0 <= j0; ++m0) {
      CAPTURE(j0);
      CAPTURE(m0);
      const InitialState init{j0, m0};
      const Wavepacket id = kick_wavepacket(init, phase_coeffs_quadrature({0.0, 0.0}, 20 + j0), 20);
      CHECK(id.m() == m0);
      CHECK(id.j_min() == std::abs(m0));
      for (int j = std::abs(m0); j <= 20; ++j) {
        CHECK(std::abs(id.coeff(j) - (j == j0 ? 1.0 : 0.0)) < 1e-14);
      }
      const Wavepacket wp = delta_kick(init, {2.3, 1.1}, 40);
      CHECK(wp.norm_defect() < 1e-9);
    }
  }
}

TEST_CASE("automatic basis size") {
  const KickStrengths k{8.0, 8.0};
  const int jm = auto_j_max(k);
  CHECK(jm >= kAutoJMaxStart);
  CHECK(jm <= kAutoJMaxCap);
  const Wavepacket wp = delta_kick({}, k);
  CHECK(wp.j_max() == jm);
  CHECK(wp.is_certified());
  CHECK(wp.norm_defect() < 1e-12);
  CHECK(auto_j_max({0.5, 0.0}) == kAutoJMaxStart);

  const Wavepacket id = delta_kick({2, 1}, {0.0, 0.0});
  CHECK(id.coeff(2) == cplx(1.0, 0.0));
  CHECK(id.meta().settings == "identity fast path");
}

TEST_CASE("provenance records the method") {
  const Wavepacket q = kick_wavepacket({}, phase_coeffs_quadrature({1.0, 1.0}, 30, specfun::gauss_legendre(80)), 30);
  CHECK(q.meta().origin == "delta-kick");
  CHECK(q.meta().settings == "quadrature order=80");
  REQUIRE(q.meta().kick.has_value());
  CHECK(q.meta().kick->p_zeta == 1.0);
  const Wavepacket s = kick_wavepacket({}, phase_coeffs_series({1.0, 1.0}, 30), 30);
  CHECK(s.meta().settings == "series k_max=80");
}

TEST_CASE("input and numerical errors") {
  CHECK_THROWS_AS(phase_coeffs_series({1.0, 1.0}, 61), InputError);
  CHECK_THROWS_AS(phase_coeffs_series({1.0, 1.0}, 10, 121), InputError);
  CHECK_THROWS_AS(phase_coeffs_series({-1.0, 1.0}, 10), InputError);
  CHECK_THROWS_AS(phase_coeffs_series({10.0, 10.0}, 20, 10), ConvergenceError);
  CHECK_THROWS_AS(phase_coeffs_quadrature({1.0, 1.0}, 20, specfun::gauss_legendre(39)), InputError);
  CHECK_NOTHROW(phase_coeffs_quadrature({1.0, 1.0}, 20, specfun::gauss_legendre(40)));
  CHECK_THROWS_AS(kick_wavepacket({}, phase_coeffs_quadrature({1.0, 1.0}, 10), 11), InputError);
  CHECK_THROWS_AS(kick_wavepacket({2, 0}, phase_coeffs_quadrature({1.0, 1.0}, 11), 10), InputError);
  CHECK_THROWS_AS(kick_wavepacket({}, phase_coeffs_quadrature({10.0, 10.0}, 5), 5), NormalizationError);
  CHECK_THROWS_AS(delta_kick({1, 2}, {1.0, 1.0}), InputError);
  CHECK_THROWS_AS(orienting_closed_form(-1.0, 10), InputError);
  CHECK_THROWS_AS(aligning_closed_form(1.0, -1), InputError);
}

TEST_CASE("wavepacket accessors") {
  const Wavepacket wp(0, {cplx(0.6, 0.0), cplx(0.0, 0.8)});
  CHECK(wp.norm() == doctest::Approx(1.0));
  CHECK(wp.coeff(5) == cplx{});
  CHECK(wp.coeff(-1) == cplx{});
  CHECK(wp.phase(1) == doctest::Approx(specfun::kPi / 2));
  CHECK(wp.phase_difference(0, 1) == doctest::Approx(-specfun::kPi / 2));
  const Wavepacket wrap(0, {std::polar(0.6, 3.0), std::polar(0.8, -3.0)});
  CHECK(wrap.phase_difference(0, 1) == doctest::Approx(6.0 - 2.0 * specfun::kPi));
  CHECK(Wavepacket::energy(3) == 12.0);
  CHECK(Wavepacket::energy_gap(2, 1) == 4.0);
  const Wavepacket ev = wp.evolved(0.3);
  CHECK(std::abs(ev.coeff(1) - wp.coeff(1) * std::polar(1.0, -0.6)) < 1e-15);
  CHECK(ev.coeff(0) == wp.coeff(0));
  CHECK(wp.tail_population() == doctest::Approx(0.64));
  CHECK_THROWS_AS(Wavepacket(0, {}), InputError);
  CHECK_THROWS_AS(Wavepacket(0, {cplx(NAN, 0.0)}), NumericalError);
}

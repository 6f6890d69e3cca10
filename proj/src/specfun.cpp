#include "rotorkick/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "rotorkick/errors.hpp"

namespace rotorkick::specfun {

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw InputError("quadrature rule needs equally many (>0) nodes and weights");
  }
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw InputError("gauss_legendre: order " + std::to_string(order) + " outside [1, " +
                     std::to_string(kMaxQuadratureOrder) + "]");
  }
  const int n = order;
  std::vector<double> nodes(n), weights(n);

  // P_n and its derivative at x.
  auto eval = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };

  const int half = (n + 1) / 2;
  const double nn = static_cast<double>(n);
  for (int i = 0; i < half; ++i) {
    const int k = i + 1;
    const bool centre = (n % 2 == 1) && (i == half - 1);
    double x = centre ? 0.0
                      : std::cos(kPi * (k - 0.25) / (nn + 0.5)) *
                            (1.0 - (nn - 1.0) / (8.0 * nn * nn * nn));
    double dp = 0.0;
    if (!centre) {
      bool converged = false;
      for (int it = 0; it < 100; ++it) {
        const double p = eval(x, dp);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) <= 1e-15) {
          converged = true;
          break;
        }
      }
      if (!converged) throw ConvergenceError("gauss_legendre: Newton iteration stalled");
    }
    eval(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[n - 1 - i] = x;
    nodes[i] = -x;
    weights[n - 1 - i] = w;
    weights[i] = w;
  }
  return QuadratureRule(std::move(nodes), std::move(weights));
}

double legendre_p(int j, double x) {
  if (j < 0) throw InputError("legendre_p: negative degree");
  if (!(std::abs(x) <= 1.0 + 1e-12)) throw InputError("legendre_p: |x| > 1");
  if (j == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < j; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_table(double x, std::span<double> out) {
  if (out.empty()) return;
  if (!(std::abs(x) <= 1.0 + 1e-12)) throw InputError("legendre_table: |x| > 1");
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + 1.0) * x * out[k] - kk * out[k - 1]) / (kk + 1.0);
  }
}

void sph_harm_table(int m, double theta, std::span<double> out) {
  if (out.empty()) return;
  const int am = std::abs(m);
  const double x = std::cos(theta);
  const double s = std::abs(std::sin(theta));
  const double flip = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;

  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int i = 1; i <= am; ++i) pmm *= -s * std::sqrt((2.0 * i + 1.0) / (2.0 * i));
  out[0] = flip * pmm;
  if (out.size() == 1) return;

  double prev = pmm;
  double cur = x * std::sqrt(2.0 * am + 3.0) * pmm;
  double a_prev = std::sqrt(2.0 * am + 3.0);
  out[1] = flip * cur;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double ll = static_cast<double>(am) + static_cast<double>(k);
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - double(am) * am));
    const double next = a * (x * cur - prev / a_prev);
    a_prev = a;
    prev = cur;
    cur = next;
    out[k] = flip * cur;
  }
}

double sph_harm_m(int j, int m, double theta) {
  const int am = std::abs(m);
  if (j < 0 || am > j) throw InputError("sph_harm_m: need |m| <= j");
  std::vector<double> table(static_cast<std::size_t>(j - am + 1));
  sph_harm_table(m, theta, table);
  return table.back();
}

namespace {

double sph_bessel_upward(int n, double x) {
  const double s = std::sin(x), c = std::cos(x);
  double jm = s / x;
  if (n == 0) return jm;
  double j = s / (x * x) - c / x;
  for (int k = 1; k < n; ++k) {
    const double next = (2.0 * k + 1.0) / x * j - jm;
    jm = j;
    j = next;
  }
  return j;
}

// Miller's downward recurrence, normalized with sum_k (2k+1) j_k^2 = 1.
double sph_bessel_miller(int n, double x) {
  const int start = n + static_cast<int>(x) + 50;
  double above = 0.0;
  double cur = 1.0;
  double sum = 0.0;
  double at_n = 0.0, at_0 = 0.0, at_1 = 0.0;
  for (int k = start; k >= 0; --k) {
    if (k == n) at_n = cur;
    if (k == 1) at_1 = cur;
    if (k == 0) at_0 = cur;
    sum += (2.0 * k + 1.0) * cur * cur;
    if (k == 0) break;
    const double below = (2.0 * k + 1.0) / x * cur - above;
    above = cur;
    cur = below;
    if (std::abs(cur) > 1e100) {
      cur *= 1e-100;
      above *= 1e-100;
      at_n *= 1e-100;
      at_1 *= 1e-100;
      sum *= 1e-200;
    }
  }
  const double norm = 1.0 / std::sqrt(sum);
  // The sum rule fixes the magnitude only; take the sign from whichever of
  // j_0, j_1 is farther from a zero.
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const double sign = std::abs(j0) >= std::abs(j1) ? std::copysign(1.0, j0 * at_0)
                                                   : std::copysign(1.0, j1 * at_1);
  return sign * at_n * norm;
}

}  // namespace

double sph_bessel_j(int n, double x) {
  if (n < 0) throw InputError("sph_bessel_j: negative order");
  if (!(x >= 0.0)) throw InputError("sph_bessel_j: negative argument");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) return x < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  if (x >= n) return sph_bessel_upward(n, x);
  return sph_bessel_miller(n, x);
}

std::complex<double> hyp1f1_imag(double a, double b, double p) {
  if (b <= 0.0 && std::floor(b) == b) throw InputError("hyp1f1_imag: b is a non-positive integer");
  if (!(std::abs(p) <= 50.0)) throw InputError("hyp1f1_imag: |p| > 50 outside working range");
#ifdef __SIZEOF_FLOAT128__
  using real = __float128;
  const real eps = 1e-30;
#else
  using real = long double;
  const real eps = 1e-18L;
#endif
  // Terms are real multiples of i^n; even n feed the real part, odd n the imaginary.
  const real ra = a, rb = b, rp = p;
  real term = 1, re = 1, im = 0;
  for (int n = 0; n < 500; ++n) {
    term = term * rp * (ra + n) / ((rb + n) * (n + 1));
    switch ((n + 1) % 4) {
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      default: im -= term; break;
    }
    const real at = term < 0 ? -term : term;
    const real mag = (re < 0 ? -re : re) + (im < 0 ? -im : im);
    if (at < eps * mag || term == 0) {
      return {static_cast<double>(re), static_cast<double>(im)};
    }
  }
  throw ConvergenceError("hyp1f1_imag: series did not converge in 500 terms");
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw InputError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

namespace {

constexpr int kLogFactTable = 2048;

const std::array<long double, kLogFactTable>& log_factorial_table() {
  static const auto table = [] {
    std::array<long double, kLogFactTable> t{};
    t[0] = 0.0L;
    for (int n = 1; n < kLogFactTable; ++n) t[n] = t[n - 1] + std::log(static_cast<long double>(n));
    return t;
  }();
  return table;
}

long double log_factorial_ld(int n) {
  if (n < 0) throw InputError("log_factorial: negative argument");
  if (n < kLogFactTable) return log_factorial_table()[n];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

}  // namespace

double log_factorial(int n) { return static_cast<double>(log_factorial_ld(n)); }

bool CGKey::valid() const {
  return j1 >= 0 && j2 >= 0 && j3 >= 0 && std::abs(m1) <= j1 && std::abs(m2) <= j2 &&
         std::abs(m3) <= j3;
}

double clebsch_gordan(const CGKey& key) {
  if (!key.valid()) return 0.0;
  const auto [j1, m1, j2, m2, j3, m3] = key;
  if (m1 + m2 != m3) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;

  const long double pre =
      0.5L * (std::log(static_cast<long double>(2 * j3 + 1)) + log_factorial_ld(j3 + j1 - j2) +
              log_factorial_ld(j3 - j1 + j2) + log_factorial_ld(j1 + j2 - j3) -
              log_factorial_ld(j1 + j2 + j3 + 1) + log_factorial_ld(j3 + m3) +
              log_factorial_ld(j3 - m3) + log_factorial_ld(j1 - m1) + log_factorial_ld(j1 + m1) +
              log_factorial_ld(j2 - m2) + log_factorial_ld(j2 + m2));

  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = log_factorial_ld(k) + log_factorial_ld(j1 + j2 - j3 - k) +
                            log_factorial_ld(j1 - m1 - k) + log_factorial_ld(j2 + m2 - k) +
                            log_factorial_ld(j3 - j2 + m1 + k) +
                            log_factorial_ld(j3 - j1 - m2 + k);
    const long double term = std::exp(pre - den);
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(sum);
}

}  // namespace rotorkick::specfun

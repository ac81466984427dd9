#pragma once

#include <cmath>
#include <stdexcept>

namespace trapchain {

// Exponentially scaled modified Bessel function e^-x I0(x) for x >= 0.
// Power series up to x = 15, asymptotic expansion beyond; the scaling
// keeps the result representable for arbitrarily large arguments.
inline double bessel_i0_scaled(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("bessel_i0_scaled: x must be >= 0");
  if (x <= 15.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return std::exp(-x) * sum;
  }
  // I0(x) ~ e^x/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * x);
    if (next >= term) break;  // divergent tail reached
    term = next;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum / std::sqrt(2.0 * M_PI * x);
}

namespace detail {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // The tolerance is floored: below ~1e-18 the error estimate is pure
  // rounding noise and further splitting cannot converge.
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol || (b - a) < 1e-11) {
    return left + right + delta / 15.0;
  }
  const double child_tol = std::max(0.5 * tol, 1e-18);
  return adaptive_simpson(f, a, m, fa, flm, fm, left, child_tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, child_tol, depth - 1);
}

}  // namespace detail

// Quadrature oracle for the same quantity:
// e^-x I0(x) = (1/pi) Integral_0^pi exp(-x (1 + cos(theta))) d(theta).
inline double bessel_i0_scaled_quadrature(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("bessel_i0_scaled_quadrature: x must be >= 0");
  const auto f = [x](double theta) { return std::exp(-x * (1.0 + std::cos(theta))); };
  const double a = 0.0;
  const double b = M_PI;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double integral = detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, 1e-15, 48);
  return integral / M_PI;
}

}  // namespace trapchain

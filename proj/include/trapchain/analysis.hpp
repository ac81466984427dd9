#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trapchain/dynamics.hpp"
#include "trapchain/perturbation.hpp"

namespace trapchain {

// Result of an unweighted least-squares line fit in log-log space.
struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;  // prefactor, exp(intercept)
  double window_lo = 0.0;  // actual range of abscissas used
  double window_hi = 0.0;
  double residual = 0.0;  // rms of log residuals
  int n_points = 0;
};

// Fit y ~ amplitude * x^exponent over the points with lo <= x <= hi.
// All windowed data must be strictly positive and at least 3 points wide.
inline PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                                 double lo, double hi) {
  if (xs.size() != ys.size()) throw std::invalid_argument("power-law fit: length mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  double used_lo = 0.0;
  double used_hi = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < lo || xs[i] > hi) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::domain_error("power-law fit: nonpositive data in window");
    }
    if (lx.empty() || xs[i] < used_lo) used_lo = xs[i];
    if (lx.empty() || xs[i] > used_hi) used_hi = xs[i];
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 3) throw std::invalid_argument("power-law fit: fewer than 3 points in window");

  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("power-law fit: degenerate window");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.amplitude = std::exp(intercept);
  fit.window_lo = used_lo;
  fit.window_hi = used_hi;
  fit.n_points = n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + fit.exponent * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// Default "small l" rank window for exponent fits on decay-part series.
inline std::pair<int, int> default_small_l_window(int n) {
  return {2, std::max(4, n / 10)};
}

// Power-law exponent of a sorted decay-part series over rank window
// [l_lo, l_hi].
inline PowerLawFit fit_mu(const GammaSeries& series, int l_lo, int l_hi) {
  std::vector<double> xs(series.gammas.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1);
  return fit_power_law(xs, series.gammas, static_cast<double>(l_lo),
                       static_cast<double>(l_hi));
}

// Power-law exponent of a survival curve over time window [t_lo, t_hi].
inline PowerLawFit fit_decay_exponent(const DecayCurve& curve, double t_lo, double t_hi) {
  return fit_power_law(curve.grid.points, curve.values, t_lo, t_hi);
}

// Sub-range where curve values lie in [10 * floor, 0.5], floor being the
// late-time plateau estimate (mean of the last 5 points). Returns the
// time bounds, or nothing when fewer than 3 points qualify.
inline std::optional<std::pair<double, double>> intermediate_window(const DecayCurve& curve) {
  const std::size_t n = curve.values.size();
  if (n == 0) return std::nullopt;
  const std::size_t tail = std::min<std::size_t>(5, n);
  double floor_est = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) floor_est += curve.values[i];
  floor_est /= tail;
  const double lo_v = 10.0 * floor_est;
  const double hi_v = 0.5;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = curve.values[i];
    if (v < lo_v || v > hi_v) continue;
    if (count == 0) t_lo = curve.grid.points[i];
    t_hi = curve.grid.points[i];
    ++count;
  }
  if (count < 3) return std::nullopt;
  return std::make_pair(t_lo, t_hi);
}

// First time where the sign of a - b flips, refined by interpolating the
// bracketing points in (log t, value) space to match log-axis plots.
// Exact zeroes do not count as a strict change.
inline std::optional<double> find_crossing(const DecayCurve& a, const DecayCurve& b) {
  if (a.grid.points != b.grid.points) {
    throw std::invalid_argument("crossing: curves must share one grid");
  }
  int last_sign = 0;
  std::size_t last_idx = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const double dp = a.values[last_idx] - b.values[last_idx];
      const double dq = a.values[i] - b.values[i];
      const double tp = a.grid.points[last_idx];
      const double tq = a.grid.points[i];
      const double f = dp / (dp - dq);
      if (tp > 0.0) return std::exp(std::log(tp) + f * (std::log(tq) - std::log(tp)));
      return tp + f * (tq - tp);
    }
    last_sign = sign;
    last_idx = i;
  }
  return std::nullopt;
}

}  // namespace trapchain

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapchain/chain.hpp"
#include "trapchain/expm.hpp"
#include "trapchain/spectral.hpp"

namespace trapchain {

enum class GridSpacing { Linear, Log };

// Strictly increasing, finite, nonnegative sample times in units of the
// inverse nearest-neighbor coupling.
struct TimeGrid {
  std::vector<double> points;
  GridSpacing spacing = GridSpacing::Log;

  static TimeGrid linear(double lo, double hi, int n) {
    if (n < 1 || !(hi > lo) || lo < 0.0) {
      throw std::invalid_argument("time grid: bad linear range");
    }
    TimeGrid g;
    g.spacing = GridSpacing::Linear;
    g.points.resize(n);
    for (int i = 0; i < n; ++i) {
      g.points[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    g.validate();
    return g;
  }

  static TimeGrid logspace(double lo, double hi, int points_per_decade) {
    if (!(lo > 0.0) || !(hi > lo) || points_per_decade < 1) {
      throw std::invalid_argument("time grid: bad log range");
    }
    const double decades = std::log10(hi / lo);
    const int n = static_cast<int>(std::lround(decades * points_per_decade)) + 1;
    TimeGrid g;
    g.spacing = GridSpacing::Log;
    g.points.resize(n);
    const double llo = std::log10(lo);
    const double lhi = std::log10(hi);
    for (int i = 0; i < n; ++i) {
      g.points[i] = std::pow(10.0, n == 1 ? llo : llo + (lhi - llo) * i / (n - 1));
    }
    g.validate();
    return g;
  }

  // Default figure grid: 400 points per decade, reaching to 1e7 for weak
  // trapping and 1e5 otherwise.
  static TimeGrid default_for(double gamma, int points_per_decade = 400) {
    const double hi = gamma <= 0.01 ? 1e7 : 1e5;
    return logspace(1e-1, hi, points_per_decade);
  }

  void validate() const {
    if (points.empty()) throw std::invalid_argument("time grid: empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i]) || points[i] < 0.0) {
        throw std::invalid_argument("time grid: times must be finite and >= 0");
      }
      if (i > 0 && points[i] <= points[i - 1]) {
        throw std::invalid_argument("time grid: times must be strictly increasing");
      }
    }
  }

  std::size_t size() const { return points.size(); }
};

enum class CurveLabel {
  QuantumExact,
  QuantumGammaSum,
  ClassicalExact,
  ClassicalDominant,
  ContinuumBessel,
};

inline const char* to_string(CurveLabel label) {
  switch (label) {
    case CurveLabel::QuantumExact: return "QUANTUM_EXACT";
    case CurveLabel::QuantumGammaSum: return "QUANTUM_GAMMA_SUM";
    case CurveLabel::ClassicalExact: return "CLASSICAL_EXACT";
    case CurveLabel::ClassicalDominant: return "CLASSICAL_DOMINANT";
    case CurveLabel::ContinuumBessel: return "CONTINUUM_BESSEL";
  }
  return "?";
}

// Survival values sampled on a grid. Values are stored raw; clipping of
// floating-point negatives happens only when curves are written out.
struct DecayCurve {
  TimeGrid grid;
  std::vector<double> values;
  CurveLabel label = CurveLabel::QuantumExact;
  std::optional<ChainConfig> config;
};

namespace detail {

inline void check_node(int node, int dim, const char* role) {
  if (node < 1 || node > dim) {
    throw std::out_of_range(std::string(role) + " node index out of range");
  }
}

inline void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be finite and >= 0");
  }
}

inline void check_survival_args(const ChainConfig& cfg, int dim, const TimeGrid& grid) {
  cfg.validate();
  grid.validate();
  if (cfg.n_nodes != dim) {
    throw std::invalid_argument("mean survival: config and spectrum dimensions differ");
  }
  if (cfg.non_trap_count() == 0) {
    throw std::invalid_argument("mean survival: empty non-trap set");
  }
}

inline Eigen::VectorXcd mode_weights(const QuantumSpectrum& spec, double t) {
  Eigen::VectorXcd w(spec.dim);
  for (int l = 0; l < spec.dim; ++l) {
    w[l] = std::exp(std::complex<double>(-spec.gamma[l] * t, -spec.epsilon[l] * t));
  }
  return w;
}

}  // namespace detail

// Amplitude vector <k|exp(-iHt)|j> for all k, from the spectrum.
inline Eigen::VectorXcd propagate_spectral(const QuantumSpectrum& spec, int j, double t) {
  detail::check_node(j, spec.dim, "start");
  detail::check_time(t);
  const Eigen::VectorXcd w = detail::mode_weights(spec, t);
  const Eigen::VectorXcd coeff =
      w.array() * spec.right_vectors.row(j - 1).transpose().array();
  return spec.right_vectors * coeff;
}

inline Eigen::VectorXd propagate_spectral_classical(const ClassicalSpectrum& spec, int j,
                                                    double t) {
  detail::check_node(j, spec.dim, "start");
  detail::check_time(t);
  Eigen::VectorXd coeff(spec.dim);
  for (int l = 0; l < spec.dim; ++l) {
    coeff[l] = std::exp(-spec.lambda[l] * t) * spec.vectors(j - 1, l);
  }
  return spec.vectors * coeff;
}

// Independent oracle: column j of exp(-iHt) via scaling and squaring,
// never via the spectrum.
inline Eigen::VectorXcd propagate_quantum_oracle(const DenseOperator& h, int j, double t) {
  detail::check_node(j, h.dim, "start");
  detail::check_time(t);
  const std::complex<double> minus_it(0.0, -t);
  return matrix_exponential(minus_it * h.entries).col(j - 1);
}

// Classical analogue: column j of exp(Tt).
inline Eigen::VectorXd propagate_classical_oracle(const DenseOperator& t_op, int j, double t) {
  detail::check_node(j, t_op.dim, "start");
  detail::check_time(t);
  return matrix_exponential(t * t_op.entries).col(j - 1).real();
}

// Transition probability between localized states.
inline double quantum_transition(const QuantumSpectrum& spec, int j, int k, double t) {
  detail::check_node(j, spec.dim, "start");
  detail::check_node(k, spec.dim, "end");
  detail::check_time(t);
  std::complex<double> amp = 0.0;
  for (int l = 0; l < spec.dim; ++l) {
    amp += std::exp(std::complex<double>(-spec.gamma[l] * t, -spec.epsilon[l] * t)) *
           spec.right_vectors(k - 1, l) * spec.right_vectors(j - 1, l);
  }
  return std::norm(amp);
}

inline double classical_transition(const ClassicalSpectrum& spec, int j, int k, double t) {
  detail::check_node(j, spec.dim, "start");
  detail::check_node(k, spec.dim, "end");
  detail::check_time(t);
  double p = 0.0;
  for (int l = 0; l < spec.dim; ++l) {
    p += std::exp(-spec.lambda[l] * t) * spec.vectors(k - 1, l) * spec.vectors(j - 1, l);
  }
  return p;
}

// Survival probability of the full wave packet started at node j,
// including amplitude still sitting on trap nodes.
inline double total_norm(const QuantumSpectrum& spec, int j, double t) {
  return propagate_spectral(spec, j, t).squaredNorm();
}

// Mean survival probability averaged over non-trap start and end nodes.
// The double node sum collapses onto the mode-overlap Gram matrix
// S(l,l') = sum_{k not in M} <k|Psi_l> conj(<k|Psi_l'>), giving
// O(dim^2) work per time point.
inline DecayCurve mean_survival_quantum(const QuantumSpectrum& spec, const ChainConfig& cfg,
                                        const TimeGrid& grid) {
  detail::check_survival_args(cfg, spec.dim, grid);
  const std::vector<int> nodes = cfg.non_trap_nodes();
  std::vector<int> rows(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) rows[i] = nodes[i] - 1;

  const Eigen::MatrixXcd sub = spec.right_vectors(rows, Eigen::all);
  const Eigen::MatrixXcd gram = sub.transpose() * sub.conjugate();
  const Eigen::MatrixXcd gram_sq = gram.cwiseProduct(gram);
  const double inv_count = 1.0 / cfg.non_trap_count();

  DecayCurve curve{grid, {}, CurveLabel::QuantumExact, cfg};
  curve.values.reserve(grid.size());
  for (double t : grid.points) {
    const Eigen::VectorXcd w = detail::mode_weights(spec, t);
    const std::complex<double> s = w.transpose() * (gram_sq * w.conjugate());
    curve.values.push_back(s.real() * inv_count);
  }
  return curve;
}

// Pure exponential mode sum: survival approximated by the decay parts
// alone. Starts at dim/(dim - traps) > 1 by construction; not clipped.
inline DecayCurve mean_survival_quantum_gamma_sum(const QuantumSpectrum& spec,
                                                  const ChainConfig& cfg,
                                                  const TimeGrid& grid) {
  detail::check_survival_args(cfg, spec.dim, grid);
  const double inv_count = 1.0 / cfg.non_trap_count();
  DecayCurve curve{grid, {}, CurveLabel::QuantumGammaSum, cfg};
  curve.values.reserve(grid.size());
  for (double t : grid.points) {
    double sum = 0.0;
    for (int l = 0; l < spec.dim; ++l) sum += std::exp(-2.0 * spec.gamma[l] * t);
    curve.values.push_back(sum * inv_count);
  }
  return curve;
}

namespace detail {

inline Eigen::VectorXd non_trap_mode_sums(const ClassicalSpectrum& spec,
                                          const ChainConfig& cfg) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.dim);
  for (int node : cfg.non_trap_nodes()) {
    u += spec.vectors.row(node - 1).transpose();
  }
  return u;
}

}  // namespace detail

// Classical mean survival: for orthonormal real modes the start/end
// double sum factorizes into squared per-mode sums over non-trap nodes.
inline DecayCurve mean_survival_classical(const ClassicalSpectrum& spec, const ChainConfig& cfg,
                                          const TimeGrid& grid) {
  detail::check_survival_args(cfg, spec.dim, grid);
  const Eigen::VectorXd u = detail::non_trap_mode_sums(spec, cfg);
  const double inv_count = 1.0 / cfg.non_trap_count();
  DecayCurve curve{grid, {}, CurveLabel::ClassicalExact, cfg};
  curve.values.reserve(grid.size());
  for (double t : grid.points) {
    double sum = 0.0;
    for (int l = 0; l < spec.dim; ++l) {
      sum += std::exp(-spec.lambda[l] * t) * u[l] * u[l];
    }
    curve.values.push_back(sum * inv_count);
  }
  return curve;
}

// Long-time approximation keeping only the slowest classical mode.
inline DecayCurve mean_survival_classical_dominant(const ClassicalSpectrum& spec,
                                                   const ChainConfig& cfg,
                                                   const TimeGrid& grid) {
  detail::check_survival_args(cfg, spec.dim, grid);
  const Eigen::VectorXd u = detail::non_trap_mode_sums(spec, cfg);
  const double weight = u[0] * u[0] / cfg.non_trap_count();  // lambda ascending
  DecayCurve curve{grid, {}, CurveLabel::ClassicalDominant, cfg};
  curve.values.reserve(grid.size());
  for (double t : grid.points) {
    curve.values.push_back(weight * std::exp(-spec.lambda[0] * t));
  }
  return curve;
}

}  // namespace trapchain

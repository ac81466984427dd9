#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "trapchain/bessel.hpp"
#include "trapchain/chain.hpp"
#include "trapchain/dynamics.hpp"
#include "trapchain/errors.hpp"
#include "trapchain/operators.hpp"

namespace trapchain {

// Closed-form eigensystem of the trap-free nearest-neighbor chain,
// indexed with the chain convention l = 1..N: theta_l = pi (N-l)/N,
// energy 2 - 2 cos(theta_l) descending in theta, the l = N mode uniform.
struct NniEigensystem {
  int n = 0;
  Eigen::VectorXd theta;     // theta[l-1]
  Eigen::VectorXd energies;  // energies[l-1] = 2 - 2 cos(theta[l-1])
  Eigen::MatrixXd vectors;   // vectors(j-1, l-1) = <j|Psi0_l>
};

inline NniEigensystem nni_eigensystem(int n) {
  if (n < 2) throw std::invalid_argument("nni eigensystem: need at least 2 nodes");
  NniEigensystem sys;
  sys.n = n;
  sys.theta.resize(n);
  sys.energies.resize(n);
  sys.vectors.resize(n, n);
  for (int l = 1; l <= n; ++l) {
    const double theta = M_PI * (n - l) / n;
    sys.theta[l - 1] = theta;
    sys.energies[l - 1] = l == n ? 0.0 : 2.0 - 2.0 * std::cos(theta);
    if (l == n) {
      sys.vectors.col(l - 1).setConstant(std::sqrt(1.0 / n));
    } else {
      const double amp = std::sqrt(2.0 / n);
      for (int j = 1; j <= n; ++j) {
        sys.vectors(j - 1, l - 1) = amp * std::cos((2 * j - 1) * theta / 2.0);
      }
    }
  }
  return sys;
}

// Amplitude of the unperturbed mode l at the first node.
inline double end_amplitude_nni(int n, int l) {
  if (l < 1 || l > n) throw std::out_of_range("end amplitude: mode index out of range");
  if (l == n) return std::sqrt(1.0 / n);
  return std::sqrt(2.0 / n) * std::cos(M_PI * (n - l) / n / 2.0);
}

enum class GammaSource { ExactDiag, FirstOrderNumeric, NniAnalytic, NnnApprox };

inline const char* to_string(GammaSource s) {
  switch (s) {
    case GammaSource::ExactDiag: return "EXACT_DIAG";
    case GammaSource::FirstOrderNumeric: return "FIRST_ORDER_NUMERIC";
    case GammaSource::NniAnalytic: return "NNI_ANALYTIC";
    case GammaSource::NnnApprox: return "NNN_APPROX";
  }
  return "?";
}

// Decay parts gamma_l sorted ascending, tagged with how they were obtained.
struct GammaSeries {
  std::vector<double> gammas;
  GammaSource source = GammaSource::ExactDiag;
  ChainConfig config;
};

// First-order decay parts from an orthonormal trap-free mode table:
// gamma_l = Gamma * sum over traps m of <m|Psi0_l>^2.
inline GammaSeries gamma_first_order(const Eigen::MatrixXd& states, const ChainConfig& cfg,
                                     GammaSource source = GammaSource::FirstOrderNumeric) {
  cfg.validate();
  if (states.rows() != cfg.n_nodes || states.cols() != cfg.n_nodes) {
    throw std::invalid_argument("first-order gamma: state table dimension mismatch");
  }
  GammaSeries series{{}, source, cfg};
  series.gammas.resize(cfg.n_nodes);
  for (int l = 0; l < cfg.n_nodes; ++l) {
    double g = 0.0;
    for (int m : cfg.traps) g += states(m - 1, l) * states(m - 1, l);
    series.gammas[l] = cfg.gamma * g;
  }
  std::sort(series.gammas.begin(), series.gammas.end());
  return series;
}

inline GammaSeries gamma_exact(const QuantumSpectrum& spec, const ChainConfig& cfg) {
  GammaSeries series{{spec.gamma.data(), spec.gamma.data() + spec.dim},
                     GammaSource::ExactDiag, cfg};
  std::sort(series.gammas.begin(), series.gammas.end());
  return series;
}

// End-trap NNI decay part for chain index l: 2 Gamma / N for the uniform
// mode, (4 Gamma / N) cos^2(theta_l / 2) otherwise.
inline double nni_end_trap_gamma(int n, double gamma, int l) {
  if (l < 1 || l > n) throw std::out_of_range("nni gamma: mode index out of range");
  if (l == n) return 2.0 * gamma / n;
  const double c = std::cos(M_PI * (n - l) / n / 2.0);
  return 4.0 * gamma / n * c * c;
}

// Leading long-range change of the end-trap decay part, the coefficient
// of 2^-nu: (8 Gamma / N) cos(theta/2) sin(2 theta) sin(theta/2).
inline double lri_gamma_correction(int n, double gamma, int l) {
  if (l < 1 || l > n) throw std::out_of_range("lri gamma correction: mode index out of range");
  if (l == n) return 0.0;
  const double theta = M_PI * (n - l) / n;
  return 8.0 * gamma / n * std::cos(theta / 2.0) * std::sin(2.0 * theta) *
         std::sin(theta / 2.0);
}

// First-order perturbed end amplitude of mode l for a given correction
// operator: <1|Psi_l> = <1|Psi0_l> + sum over r != l of
// <Psi0_r|C|Psi0_l> / (E0_l - E0_r) * <1|Psi0_r>.
inline Eigen::VectorXd end_amplitudes_first_order(const NniEigensystem& sys,
                                                  const DenseOperator& correction) {
  if (correction.dim != sys.n) {
    throw std::invalid_argument("end amplitudes: correction operator dimension mismatch");
  }
  const Eigen::MatrixXd coupling =
      sys.vectors.transpose() * correction.real_part() * sys.vectors;
  Eigen::VectorXd amps(sys.n);
  for (int l = 0; l < sys.n; ++l) {
    double acc = sys.vectors(0, l);
    for (int r = 0; r < sys.n; ++r) {
      if (r == l) continue;
      const double gap = sys.energies[l] - sys.energies[r];
      if (std::abs(gap) < 1e-10) {
        std::ostringstream msg;
        msg << "end amplitudes: degenerate unperturbed gap between modes " << (l + 1)
            << " and " << (r + 1) << " (|gap| = " << std::abs(gap) << ")";
        throw numerical_error(msg.str());
      }
      acc += coupling(r, l) / gap * sys.vectors(0, r);
    }
    amps[l] = acc;
  }
  return amps;
}

// Mode-l end amplitude with the full long-range correction operator.
inline double end_amplitude_full(int l, const ChainConfig& cfg) {
  cfg.validate();
  if (l < 1 || l > cfg.n_nodes) throw std::out_of_range("end amplitude: mode index out of range");
  const NniEigensystem sys = nni_eigensystem(cfg.n_nodes);
  return end_amplitudes_first_order(sys, long_range_correction(cfg))[l - 1];
}

// Numerically exact end amplitudes <1|Psi_l> of the trap-free chain,
// ordered with the chain convention (ascending energy rank k pairs with
// index l = N - k) and sign-aligned to the unperturbed modes.
inline Eigen::VectorXd exact_end_amplitudes(const ChainConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_nodes;
  const NniEigensystem sys = nni_eigensystem(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(chain_hamiltonian(cfg).real_part());
  if (solver.info() != Eigen::Success) {
    throw numerical_error("exact end amplitudes: eigensolver failed to converge");
  }
  Eigen::VectorXd amps(n);
  for (int l = 1; l <= n; ++l) {
    const int k = n - l;
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    if (v.dot(sys.vectors.col(l - 1)) < 0.0) v = -v;
    amps[l - 1] = v[0];
  }
  return amps;
}

// Next-nearest-neighbor closed form of the perturbed end amplitude:
// sqrt(2/N) [cos(theta/2) + 2^-nu sin(2 theta) sin(theta/2)].
inline double end_amplitude_nnn(int l, int n, const InteractionExponent& nu) {
  if (nu.is_nearest_neighbor()) {
    throw std::invalid_argument("nnn end amplitude: finite exponent required");
  }
  if (l < 1 || l > n) throw std::out_of_range("end amplitude: mode index out of range");
  const double theta = M_PI * (n - l) / n;
  const double amp = std::sqrt(2.0 / n);
  return amp * std::cos(theta / 2.0) +
         std::pow(2.0, -nu.value()) * amp * std::sin(2.0 * theta) * std::sin(theta / 2.0);
}

// Decay parts expanded to first order in 2^-nu for end traps.
inline GammaSeries gamma_nnn_expansion(const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.nu.is_nearest_neighbor()) {
    throw std::invalid_argument("nnn gamma expansion: finite exponent required");
  }
  if (!cfg.has_end_traps()) {
    throw std::invalid_argument("nnn gamma expansion: derived for end traps {1, N} only");
  }
  const double weight = std::pow(2.0, -cfg.nu.value());
  GammaSeries series{{}, GammaSource::NnnApprox, cfg};
  series.gammas.resize(cfg.n_nodes);
  for (int l = 1; l <= cfg.n_nodes; ++l) {
    series.gammas[l - 1] = nni_end_trap_gamma(cfg.n_nodes, cfg.gamma, l) +
                           weight * lri_gamma_correction(cfg.n_nodes, cfg.gamma, l);
  }
  std::sort(series.gammas.begin(), series.gammas.end());
  return series;
}

// Local log-log slope of a sorted series between ranks l and l+1.
inline double mu_local(const GammaSeries& series, int l) {
  const int n = static_cast<int>(series.gammas.size());
  if (l < 1 || l + 1 > n) throw std::out_of_range("mu_local: rank out of range");
  const double a = series.gammas[l - 1];
  const double b = series.gammas[l];
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("mu_local: nonpositive decay part in window");
  }
  return (std::log(b) - std::log(a)) / (std::log(l + 1.0) - std::log(static_cast<double>(l)));
}

// Analytic local exponent of the NNI end-trap series between chain
// indices l and l+1 (both below N).
inline double mu_nni_analytic(int n, int l) {
  if (l < 1 || l + 1 > n - 1) throw std::out_of_range("mu analytic: index out of range");
  const double a = nni_end_trap_gamma(n, 1.0, l);
  const double b = nni_end_trap_gamma(n, 1.0, l + 1);
  return (std::log(b) - std::log(a)) / (std::log(l + 1.0) - std::log(static_cast<double>(l)));
}

// Analytic long-range shift of the local exponent, the coefficient of
// 2^-nu: [g1/g0(l+1) - g1/g0(l)] / [ln(l+1) - ln l].
inline double mu_lri_correction(int n, int l) {
  if (l < 1 || l + 1 > n - 1) throw std::out_of_range("mu correction: index out of range");
  const double r_hi = lri_gamma_correction(n, 1.0, l + 1) / nni_end_trap_gamma(n, 1.0, l + 1);
  const double r_lo = lri_gamma_correction(n, 1.0, l) / nni_end_trap_gamma(n, 1.0, l);
  return (r_hi - r_lo) / (std::log(l + 1.0) - std::log(static_cast<double>(l)));
}

enum class BesselMethod { SeriesAsymptotic, Quadrature };

// Continuum-limit survival e^-at I0(at), the N -> infinity curve at
// fixed rate a = 4 Gamma / N.
inline DecayCurve continuum_survival(double a, const TimeGrid& grid,
                                     BesselMethod method = BesselMethod::SeriesAsymptotic) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("continuum survival: rate must be finite and > 0");
  }
  grid.validate();
  DecayCurve curve{grid, {}, CurveLabel::ContinuumBessel, std::nullopt};
  curve.values.reserve(grid.size());
  for (double t : grid.points) {
    const double x = a * t;
    curve.values.push_back(method == BesselMethod::SeriesAsymptotic
                               ? bessel_i0_scaled(x)
                               : bessel_i0_scaled_quadrature(x));
  }
  return curve;
}

}  // namespace trapchain

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "trapchain/errors.hpp"
#include "trapchain/operators.hpp"

namespace trapchain {

enum class Ordering { ByGammaAsc, ByEpsilonAsc };

// The trapped Hamiltonian is complex symmetric, so the left eigenvector is
// the unconjugated transpose of the right one. This is the only rule the
// library supports; the tag records it in the result.
enum class LeftOverlapRule { TransposeBilinear };

// Complete spectrum of the trapped Hamiltonian. Eigenvalue l is
// epsilon[l] - i * gamma[l]; right_vectors.col(l) holds <k|Psi_l> with the
// bilinear normalization sum_k <k|Psi_l>^2 = 1, so <Psi~_l|k> is the same
// number without conjugation.
struct QuantumSpectrum {
  int dim = 0;
  Eigen::VectorXd epsilon;
  Eigen::VectorXd gamma;
  Eigen::MatrixXcd right_vectors;
  LeftOverlapRule left_overlap_rule = LeftOverlapRule::TransposeBilinear;
  Ordering ordering = Ordering::ByGammaAsc;

  std::complex<double> eigenvalue(int l) const { return {epsilon[l], -gamma[l]}; }
};

// Orthonormal eigensystem of the classical transfer operator T; its
// eigenvalues are -lambda[l] with lambda ascending.
struct ClassicalSpectrum {
  int dim = 0;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd vectors;
};

namespace detail {

inline int max_component_index(const Eigen::VectorXcd& v) {
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

// Sort by the primary key; runs of primary values closer than 1e-14 are
// re-sorted by (secondary, max-component index) so near-ties come out in
// a reproducible order.
inline std::vector<int> ordered_indices(const Eigen::VectorXd& primary,
                                        const Eigen::VectorXd& secondary,
                                        const std::vector<int>& maxcomp) {
  const int n = static_cast<int>(primary.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (primary[a] != primary[b]) return primary[a] < primary[b];
    if (secondary[a] != secondary[b]) return secondary[a] < secondary[b];
    return maxcomp[a] < maxcomp[b];
  });
  constexpr double kTie = 1e-14;
  std::vector<int> bounds{0};
  for (int i = 1; i < n; ++i) {
    if (primary[idx[i]] - primary[idx[i - 1]] > kTie) bounds.push_back(i);
  }
  bounds.push_back(n);
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    std::sort(idx.begin() + bounds[b], idx.begin() + bounds[b + 1], [&](int a, int c) {
      if (secondary[a] != secondary[c]) return secondary[a] < secondary[c];
      return maxcomp[a] < maxcomp[c];
    });
  }
  return idx;
}

// Deterministic overall sign: make the dominant component point into the
// right half plane (positive imaginary axis on the boundary).
inline void canonical_sign(Eigen::Ref<Eigen::VectorXcd> v) {
  const std::complex<double> pivot = v[max_component_index(v)];
  if (pivot.real() < 0.0 || (pivot.real() == 0.0 && pivot.imag() < 0.0)) v = -v;
}

}  // namespace detail

// Full eigendecomposition of a (complex) symmetric operator. Left
// eigenvectors are never solved for separately: each right eigenvector is
// rescaled to bilinear norm one, which fails loudly when |v^T v| drops
// below 1e-10 (approach to an exceptional point).
inline QuantumSpectrum decompose_quantum(const DenseOperator& h,
                                         Ordering ordering = Ordering::ByGammaAsc) {
  const int n = h.dim;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.entries, true);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("quantum decomposition: eigensolver failed to converge");
  }
  Eigen::VectorXcd values = solver.eigenvalues();
  Eigen::MatrixXcd vectors = solver.eigenvectors();

  for (int l = 0; l < n; ++l) {
    Eigen::VectorXcd v = vectors.col(l);
    const std::complex<double> bilinear = (v.array() * v.array()).sum();
    if (std::abs(bilinear) < 1e-10) {
      double gap = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n; ++r) {
        if (r != l) gap = std::min(gap, std::abs(values[l] - values[r]));
      }
      std::ostringstream msg;
      msg << "quantum decomposition: bilinear norm collapsed at mode " << l
          << " (|v^T v| = " << std::abs(bilinear) << ", nearest eigenvalue gap = " << gap
          << "); operator is too close to an exceptional point";
      throw numerical_error(msg.str());
    }
    v /= std::sqrt(bilinear);
    detail::canonical_sign(v);
    vectors.col(l) = v;
  }

  Eigen::VectorXd eps = values.real();
  Eigen::VectorXd gam = -values.imag().array();
  std::vector<int> maxcomp(n);
  for (int l = 0; l < n; ++l) maxcomp[l] = detail::max_component_index(vectors.col(l));

  const std::vector<int> idx = ordering == Ordering::ByGammaAsc
                                   ? detail::ordered_indices(gam, eps, maxcomp)
                                   : detail::ordered_indices(eps, gam, maxcomp);

  QuantumSpectrum spec;
  spec.dim = n;
  spec.ordering = ordering;
  spec.epsilon.resize(n);
  spec.gamma.resize(n);
  spec.right_vectors.resize(n, n);
  for (int l = 0; l < n; ++l) {
    spec.epsilon[l] = eps[idx[l]];
    spec.gamma[l] = gam[idx[l]];
    spec.right_vectors.col(l) = vectors.col(idx[l]);
  }
  return spec;
}

// Orthonormal decomposition of the real symmetric transfer operator,
// reported as decay rates lambda = -eigenvalue in ascending order.
inline ClassicalSpectrum decompose_classical(const DenseOperator& t) {
  if (t.kind == OperatorKind::ComplexSymmetric) {
    throw std::invalid_argument("classical decomposition: real symmetric operator required");
  }
  const int n = t.dim;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t.real_part());
  if (solver.info() != Eigen::Success) {
    throw numerical_error("classical decomposition: eigensolver failed to converge");
  }
  ClassicalSpectrum spec;
  spec.dim = n;
  spec.lambda.resize(n);
  spec.vectors.resize(n, n);
  // Solver returns eigenvalues ascending; lambda = -eigenvalue reverses them.
  for (int l = 0; l < n; ++l) {
    const int src = n - 1 - l;
    spec.lambda[l] = -solver.eigenvalues()[src];
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    int pivot = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(v[i]) > best) {
        best = std::abs(v[i]);
        pivot = i;
      }
    }
    if (v[pivot] < 0.0) v = -v;
    spec.vectors.col(l) = v;
  }
  return spec;
}

}  // namespace trapchain

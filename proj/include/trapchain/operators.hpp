#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <utility>

#include "trapchain/chain.hpp"

namespace trapchain {

enum class OperatorKind { RealSymmetric, ComplexSymmetric, Diagonal };

// Dense N x N operator with symmetry metadata. Symmetry is bit-exact and
// checked at construction; builders assign mirrored entries once.
struct DenseOperator {
  int dim = 0;
  Eigen::MatrixXcd entries;
  OperatorKind kind = OperatorKind::RealSymmetric;

  static DenseOperator make(Eigen::MatrixXcd m, OperatorKind kind) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw std::invalid_argument("dense operator: square matrix required");
    }
    const int n = static_cast<int>(m.rows());
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        if (m(j, k) != m(k, j)) {
          throw std::invalid_argument("dense operator: entries not symmetric");
        }
        if (kind == OperatorKind::Diagonal && m(j, k) != 0.0) {
          throw std::invalid_argument("dense operator: off-diagonal entry in diagonal kind");
        }
      }
    }
    if (kind != OperatorKind::ComplexSymmetric) {
      if ((m.imag().array() != 0.0).any()) {
        throw std::invalid_argument("dense operator: real kind with nonzero imaginary part");
      }
    }
    return DenseOperator{n, std::move(m), kind};
  }

  Eigen::MatrixXd real_part() const { return entries.real(); }

  double inf_norm() const { return entries.cwiseAbs().rowwise().sum().maxCoeff(); }
};

// Trap-free chain Hamiltonian: off-diagonal -R^-nu couplings, diagonal
// accumulated as explicit R^-nu sums in ascending-R order so that row
// sums vanish to accumulation accuracy. Equals the connectivity matrix
// of the weighted chain.
inline DenseOperator chain_hamiltonian(const ChainConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_nodes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const double v = -cfg.nu.coupling(k - j);
      m(j - 1, k - 1) = v;
      m(k - 1, j - 1) = v;
    }
  }
  for (int j = 1; j <= n; ++j) {
    const int left = j - 1;
    const int right = n - j;
    double diag = 0.0;
    for (int r = 1; r <= std::max(left, right); ++r) {
      if (r <= left) diag += cfg.nu.coupling(r);
      if (r <= right) diag += cfg.nu.coupling(r);
    }
    m(j - 1, j - 1) = diag;
  }
  return DenseOperator::make(std::move(m), OperatorKind::RealSymmetric);
}

// Diagonal trap operator: strength gamma on each trap node.
inline DenseOperator trap_operator(const ChainConfig& cfg) {
  cfg.validate();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.n_nodes, cfg.n_nodes);
  for (int t : cfg.traps) m(t - 1, t - 1) = cfg.gamma;
  return DenseOperator::make(std::move(m), OperatorKind::Diagonal);
}

// Non-Hermitian trapped Hamiltonian: chain Hamiltonian minus i times the
// trap operator. Imaginary entries live only on the trap diagonal.
inline DenseOperator trapped_hamiltonian(const ChainConfig& cfg) {
  DenseOperator h0 = chain_hamiltonian(cfg);
  const std::complex<double> minus_i(0.0, -1.0);
  for (int t : cfg.traps) h0.entries(t - 1, t - 1) += minus_i * cfg.gamma;
  return DenseOperator::make(std::move(h0.entries), OperatorKind::ComplexSymmetric);
}

// Classical transfer operator: negated chain Hamiltonian minus the trap
// operator; real symmetric and negative semidefinite.
inline DenseOperator classical_transfer(const ChainConfig& cfg) {
  DenseOperator h0 = chain_hamiltonian(cfg);
  Eigen::MatrixXcd m = -h0.entries;
  for (int t : cfg.traps) m(t - 1, t - 1) -= cfg.gamma;
  return DenseOperator::make(std::move(m), OperatorKind::RealSymmetric);
}

// Exact long-range correction: chain(nu) minus chain(NNI). Every coupling
// beyond nearest neighbors, all ranges.
inline DenseOperator long_range_correction(const ChainConfig& cfg) {
  if (cfg.nu.is_nearest_neighbor()) {
    throw std::invalid_argument("long-range correction: vanishes in the NNI limit");
  }
  ChainConfig nni = cfg;
  nni.nu = InteractionExponent::nearest_neighbor();
  Eigen::MatrixXcd m = chain_hamiltonian(cfg).entries - chain_hamiltonian(nni).entries;
  return DenseOperator::make(std::move(m), OperatorKind::RealSymmetric);
}

// Diagonal rule for the truncated correction below. RowSumZero gives each
// node 2^-nu per next-nearest neighbor it actually has; Literal swaps the
// interior/boundary weights as published.
enum class NnnDiagonal { RowSumZero, Literal };

// Long-range correction truncated at next-nearest neighbors: -2^-nu on
// the |j-k| = 2 band plus a compensating diagonal.
inline DenseOperator long_range_correction_nnn(const ChainConfig& cfg,
                                               NnnDiagonal rule = NnnDiagonal::RowSumZero) {
  if (cfg.nu.is_nearest_neighbor()) {
    throw std::invalid_argument("nnn correction: vanishes in the NNI limit");
  }
  cfg.validate();
  const int n = cfg.n_nodes;
  if (n < 3) throw std::invalid_argument("nnn correction: need at least 3 nodes");
  const double w = cfg.nu.coupling(2);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 1; j + 2 <= n; ++j) {
    m(j - 1, j + 1) = -w;
    m(j + 1, j - 1) = -w;
  }
  for (int j = 1; j <= n; ++j) {
    if (rule == NnnDiagonal::RowSumZero) {
      const int neighbors = (j - 2 >= 1 ? 1 : 0) + (j + 2 <= n ? 1 : 0);
      m(j - 1, j - 1) = neighbors * w;
    } else {
      const bool interior = j > 2 && j < n - 1;
      m(j - 1, j - 1) = interior ? w : 2.0 * w;
    }
  }
  return DenseOperator::make(std::move(m), OperatorKind::RealSymmetric);
}

}  // namespace trapchain

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "trapchain/errors.hpp"

namespace trapchain {

// Dense matrix exponential by scaling and squaring on a Taylor core:
// the argument is halved until its row-sum norm is at most 1/2, a
// Horner-evaluated series of order 18 is applied, and the result is
// squared back up. Independent of any eigendecomposition.
inline Eigen::MatrixXcd matrix_exponential(Eigen::MatrixXcd a) {
  if (!a.allFinite()) throw numerical_error("matrix exponential: non-finite input");
  const int n = static_cast<int>(a.rows());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    a *= std::ldexp(1.0, -squarings);
  }

  constexpr int kOrder = 18;
  Eigen::MatrixXcd x = id;
  for (int k = kOrder; k >= 1; --k) {
    x = id + (a * x) / static_cast<double>(k);
  }
  for (int s = 0; s < squarings; ++s) x = x * x;

  if (!x.allFinite()) throw numerical_error("matrix exponential: non-finite result");
  return x;
}

}  // namespace trapchain

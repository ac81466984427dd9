#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <cstring>
#include <vector>

#include <trapchain/spectral.hpp>

using namespace trapchain;

namespace {

const auto kNni = InteractionExponent::nearest_neighbor();

std::vector<ChainConfig> test_grid() {
  std::vector<ChainConfig> grid;
  for (int n : {4, 10, 25}) {
    for (const char* nu : {"2", "3.5", "inf"}) {
      for (double g : {0.0, 0.001, 1.0}) {
        grid.push_back(make_config(n, InteractionExponent::parse(nu), g, {1, n}));
        grid.push_back(make_config(n, InteractionExponent::parse(nu), g, {2}));
      }
    }
  }
  return grid;
}

}  // namespace

TEST_CASE("two-node fully trapped chain has the closed-form spectrum") {
  auto spec = decompose_quantum(trapped_hamiltonian(make_config(2, kNni, 0.5, {1, 2})));
  // eigenvalues -0.5i and 2 - 0.5i, both decay parts 0.5
  CHECK(spec.gamma[0] == Catch::Approx(0.5).margin(1e-14));
  CHECK(spec.gamma[1] == Catch::Approx(0.5).margin(1e-14));
  std::vector<double> eps{spec.epsilon[0], spec.epsilon[1]};
  std::sort(eps.begin(), eps.end());
  CHECK(eps[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(eps[1] == Catch::Approx(2.0).margin(1e-14));
  CHECK(spec.gamma.sum() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("trap-free three-node spectrum") {
  auto spec = decompose_quantum(trapped_hamiltonian(make_config(3, kNni, 0.0, {})));
  CHECK(spec.gamma.cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::VectorXd eps = spec.epsilon;
  std::sort(eps.data(), eps.data() + 3);
  CHECK(eps[0] == Catch::Approx(0.0).margin(1e-13));
  CHECK(eps[1] == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(eps[2] == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("quantum spectra satisfy trace, residual, biorthogonality bounds") {
  for (const auto& cfg : test_grid()) {
    auto h = trapped_hamiltonian(cfg);
    auto spec = decompose_quantum(h);

    const double tr = chain_hamiltonian(cfg).real_part().trace();
    CHECK(std::abs(spec.epsilon.sum() - tr) <= 1e-9 * std::abs(tr));
    const double gsum = cfg.gamma * cfg.trap_count();
    CHECK(std::abs(spec.gamma.sum() - gsum) <= 1e-9 * std::max(gsum, 1.0));
    CHECK(spec.gamma.minCoeff() >= -1e-12);

    const double hnorm = h.inf_norm();
    for (int l = 0; l < spec.dim; ++l) {
      const Eigen::VectorXcd r =
          h.entries * spec.right_vectors.col(l) - spec.eigenvalue(l) * spec.right_vectors.col(l);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-9 * hnorm);
    }

    // left vector = unconjugated transpose of the right one
    const Eigen::MatrixXcd overlap =
        spec.right_vectors.transpose() * spec.right_vectors;
    const Eigen::MatrixXcd delta =
        overlap - Eigen::MatrixXcd::Identity(spec.dim, spec.dim);
    CHECK(delta.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("gamma ordering ascending, epsilon ordering available") {
  auto cfg = make_config(30, InteractionExponent::finite(3.0), 0.8, {1, 30});
  auto h = trapped_hamiltonian(cfg);
  auto by_gamma = decompose_quantum(h);
  for (int l = 1; l < 30; ++l) CHECK(by_gamma.gamma[l] >= by_gamma.gamma[l - 1]);
  auto by_eps = decompose_quantum(h, Ordering::ByEpsilonAsc);
  for (int l = 1; l < 30; ++l) CHECK(by_eps.epsilon[l] >= by_eps.epsilon[l - 1]);
}

TEST_CASE("spectral reconstruction rebuilds the operator") {
  auto cfg = make_config(50, InteractionExponent::finite(3.0), 1.0, {1, 50});
  auto h = trapped_hamiltonian(cfg);
  auto spec = decompose_quantum(h);
  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(50, 50);
  for (int l = 0; l < 50; ++l) {
    rebuilt += spec.eigenvalue(l) * spec.right_vectors.col(l) *
               spec.right_vectors.col(l).transpose();
  }
  CHECK((rebuilt - h.entries).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("determinism: identical input gives identical bytes") {
  auto cfg = make_config(40, InteractionExponent::finite(2.5), 0.7, {1, 40});
  auto h = trapped_hamiltonian(cfg);
  auto a = decompose_quantum(h);
  auto b = decompose_quantum(h);
  CHECK(std::memcmp(a.epsilon.data(), b.epsilon.data(), sizeof(double) * 40) == 0);
  CHECK(std::memcmp(a.gamma.data(), b.gamma.data(), sizeof(double) * 40) == 0);
  CHECK(std::memcmp(a.right_vectors.data(), b.right_vectors.data(),
                    sizeof(std::complex<double>) * 40 * 40) == 0);
}

TEST_CASE("weak trapping: mode with smallest real part decays at 2 Gamma / N") {
  auto cfg = make_config(100, kNni, 0.001, {1, 100});
  auto spec = decompose_quantum(trapped_hamiltonian(cfg));
  int lmin = 0;
  for (int l = 1; l < 100; ++l) {
    if (spec.epsilon[l] < spec.epsilon[lmin]) lmin = l;
  }
  CHECK(spec.gamma[lmin] == Catch::Approx(2.0 * 0.001 / 100).margin(1e-7));
}

TEST_CASE("exceptional point fails loudly") {
  // [[2, i], [i, 0]] has a double eigenvalue 1 with a single eigenvector
  // of vanishing bilinear norm.
  Eigen::MatrixXcd m(2, 2);
  m << std::complex<double>(2, 0), std::complex<double>(0, 1),
      std::complex<double>(0, 1), std::complex<double>(0, 0);
  auto op = DenseOperator::make(m, OperatorKind::ComplexSymmetric);
  CHECK_THROWS_AS(decompose_quantum(op), numerical_error);
}

TEST_CASE("classical two-node spectrum") {
  auto spec = decompose_classical(classical_transfer(make_config(2, kNni, 0.0, {})));
  CHECK(spec.lambda[0] == Catch::Approx(0.0).margin(1e-13));
  CHECK(spec.lambda[1] == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("classical spectra: orthonormal, residuals, nonnegative rates") {
  for (const auto& cfg : test_grid()) {
    auto t = classical_transfer(cfg);
    auto spec = decompose_classical(t);
    for (int l = 1; l < spec.dim; ++l) CHECK(spec.lambda[l] >= spec.lambda[l - 1]);
    CHECK(spec.lambda.minCoeff() >= -1e-12);
    if (cfg.gamma > 0.0 && cfg.trap_count() > 0) CHECK(spec.lambda[0] > 1e-12);
    if (cfg.gamma == 0.0) {
      CHECK(spec.lambda[0] <= 1e-12);
      const Eigen::VectorXd uniform =
          Eigen::VectorXd::Constant(spec.dim, std::sqrt(1.0 / spec.dim));
      CHECK((spec.vectors.col(0).cwiseAbs() - uniform).cwiseAbs().maxCoeff() <= 1e-10);
    }

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(spec.dim, spec.dim);
    CHECK((spec.vectors.transpose() * spec.vectors - eye).cwiseAbs().maxCoeff() <= 1e-10);
    const double tnorm = t.inf_norm();
    for (int l = 0; l < spec.dim; ++l) {
      const Eigen::VectorXd r =
          t.real_part() * spec.vectors.col(l) + spec.lambda[l] * spec.vectors.col(l);
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * tnorm);
    }
  }
}

TEST_CASE("trap-free quantum and classical eigenvalues coincide") {
  for (const char* nu : {"2", "inf"}) {
    auto cfg = make_config(20, InteractionExponent::parse(nu), 0.0, {});
    auto q = decompose_quantum(trapped_hamiltonian(cfg), Ordering::ByEpsilonAsc);
    auto c = decompose_classical(classical_transfer(cfg));
    for (int l = 0; l < 20; ++l) {
      CHECK(std::abs(q.epsilon[l] - c.lambda[l]) <= 1e-10);
    }
  }
}

TEST_CASE("classical decomposition rejects complex operators") {
  auto h = trapped_hamiltonian(make_config(4, kNni, 0.5, {1}));
  CHECK_THROWS_AS(decompose_classical(h), std::invalid_argument);
}

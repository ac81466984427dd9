#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <trapchain/analysis.hpp>
#include <trapchain/perturbation.hpp>
#include <trapchain/spectral.hpp>

using namespace trapchain;

namespace {

const auto kNni = InteractionExponent::nearest_neighbor();

}  // namespace

TEST_CASE("nni eigensystem: two-node closed form") {
  auto sys = nni_eigensystem(2);
  CHECK(sys.theta[0] == Catch::Approx(M_PI / 2));
  CHECK(sys.theta[1] == 0.0);
  CHECK(sys.energies[0] == Catch::Approx(2.0));
  CHECK(sys.energies[1] == 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(sys.vectors(0, 0) == Catch::Approx(r));
  CHECK(sys.vectors(1, 0) == Catch::Approx(-r));
  CHECK(sys.vectors(0, 1) == Catch::Approx(r));
  CHECK(sys.vectors(1, 1) == Catch::Approx(r));
  CHECK_THROWS_AS(nni_eigensystem(1), std::invalid_argument);
}

TEST_CASE("nni eigensystem: orthonormal and diagonalizes the chain") {
  const int n = 100;
  auto sys = nni_eigensystem(n);
  CHECK(sys.energies[n - 1] == 0.0);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  CHECK((sys.vectors.transpose() * sys.vectors - eye).cwiseAbs().maxCoeff() <= 1e-12);

  auto h = chain_hamiltonian(make_config(n, kNni, 0.0, {}));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real_part());
  // ascending numeric rank k pairs with chain index l = n - k
  for (int k = 0; k < n; ++k) {
    const int l = n - k;
    CHECK(std::abs(es.eigenvalues()[k] - sys.energies[l - 1]) <= 1e-10);
    Eigen::VectorXd v = es.eigenvectors().col(k);
    if (v.dot(sys.vectors.col(l - 1)) < 0.0) v = -v;
    CHECK((v - sys.vectors.col(l - 1)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("first-order decay parts: end-trap closed forms and completeness") {
  const int n = 100;
  const double g = 0.001;
  auto cfg = make_config(n, kNni, g, {1, n});
  auto sys = nni_eigensystem(n);
  auto series = gamma_first_order(sys.vectors, cfg, GammaSource::NniAnalytic);
  CHECK(series.source == GammaSource::NniAnalytic);

  std::vector<double> expect(n);
  for (int l = 1; l <= n; ++l) expect[l - 1] = nni_end_trap_gamma(n, g, l);
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < n; ++i) {
    CHECK(series.gammas[i] == Catch::Approx(expect[i]).margin(1e-15));
  }

  double sum = 0.0;
  for (double v : series.gammas) sum += v;
  CHECK(sum == Catch::Approx(g * 2).margin(1e-12));

  // completeness holds for any orthonormal table and trap set
  auto cfg2 = make_config(40, InteractionExponent::finite(3.0), 0.7, {3, 17});
  auto h2 = chain_hamiltonian(cfg2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h2.real_part());
  auto series2 = gamma_first_order(es.eigenvectors(), cfg2);
  double sum2 = 0.0;
  for (double v : series2.gammas) sum2 += v;
  CHECK(sum2 == Catch::Approx(0.7 * 2).margin(1e-12));
}

TEST_CASE("end-trap symmetry of the unperturbed modes") {
  const int n = 100;
  auto sys = nni_eigensystem(n);
  for (int l = 1; l <= n; ++l) {
    const double a = sys.vectors(0, l - 1);
    const double b = sys.vectors(n - 1, l - 1);
    CHECK(std::abs(a * a - b * b) <= 1e-12);
  }
}

TEST_CASE("first-order decay parts track exact diagonalization at weak trapping") {
  const int n = 100;
  const double g = 0.001;
  auto cfg = make_config(n, kNni, g, {1, n});
  auto exact = gamma_exact(decompose_quantum(trapped_hamiltonian(cfg)), cfg);
  auto first = gamma_first_order(nni_eigensystem(n).vectors, cfg, GammaSource::NniAnalytic);
  double maxerr = 0.0;
  for (int i = 0; i < n; ++i) {
    maxerr = std::max(maxerr, std::abs(exact.gammas[i] - first.gammas[i]));
  }
  CHECK(maxerr <= 50.0 * g * g);
}

TEST_CASE("perturbed end amplitudes: large nu reduces to the unperturbed value") {
  const int n = 30;
  auto cfg = make_config(n, InteractionExponent::finite(40.0), 0.0, {});
  for (int l : {1, 7, n / 2, n}) {
    CHECK(end_amplitude_full(l, cfg) ==
          Catch::Approx(end_amplitude_nni(n, l)).margin(1e-11));
  }
}

TEST_CASE("uniform mode is exact: zero correction at every nu") {
  // the correction operator has vanishing row sums, so the uniform mode
  // stays an exact eigenvector
  for (double nu : {2.0, 5.0, 10.0}) {
    auto cfg = make_config(50, InteractionExponent::finite(nu), 0.0, {});
    CHECK(end_amplitude_full(50, cfg) ==
          Catch::Approx(std::sqrt(1.0 / 50)).margin(1e-12));
  }
}

TEST_CASE("degenerate unperturbed gap fails loudly") {
  NniEigensystem sys = nni_eigensystem(4);
  sys.energies[1] = sys.energies[2];  // force a degeneracy
  auto cfg = make_config(4, InteractionExponent::finite(3.0), 0.0, {});
  CHECK_THROWS_AS(end_amplitudes_first_order(sys, long_range_correction(cfg)),
                  numerical_error);
}

TEST_CASE("closed-form end amplitude: value and limits") {
  const int n = 100;
  auto nu = InteractionExponent::finite(10.0);
  CHECK(end_amplitude_nnn(n, n, nu) == Catch::Approx(std::sqrt(2.0 / n)));
  CHECK_THROWS_AS(end_amplitude_nnn(1, n, kNni), std::invalid_argument);

  // against the full first-order evaluation
  auto cfg = make_config(n, nu, 0.0, {});
  auto sys = nni_eigensystem(n);
  Eigen::VectorXd full = end_amplitudes_first_order(sys, long_range_correction(cfg));
  double max_dev = 0.0;
  double max_corr = 0.0;
  for (int l = 1; l < n; ++l) {
    max_dev = std::max(max_dev, std::abs(end_amplitude_nnn(l, n, nu) - full[l - 1]));
    max_corr = std::max(max_corr, std::abs(full[l - 1] - end_amplitude_nni(n, l)));
  }
  CHECK(max_dev <= 0.1 * max_corr);
}

TEST_CASE("closed form matches first order with the truncated operator") {
  const int n = 100;
  const double nuval = 10.0;
  auto nu = InteractionExponent::finite(nuval);
  auto cfg = make_config(n, nu, 0.0, {});
  auto sys = nni_eigensystem(n);
  const double scale = std::pow(2.0, -nuval);

  Eigen::VectorXd rowsum = end_amplitudes_first_order(sys, long_range_correction_nnn(cfg));
  double dev = 0.0;
  for (int l = 1; l < n; ++l) {
    dev = std::max(dev, std::abs(rowsum[l - 1] - end_amplitude_nnn(l, n, nu)));
  }
  CHECK(dev <= scale * 2.0 / n);

  // the published literal diagonal does not reproduce the closed form
  Eigen::VectorXd literal = end_amplitudes_first_order(
      sys, long_range_correction_nnn(cfg, NnnDiagonal::Literal));
  double dev_lit = 0.0;
  for (int l = 1; l < n; ++l) {
    dev_lit = std::max(dev_lit, std::abs(literal[l - 1] - end_amplitude_nnn(l, n, nu)));
  }
  CHECK(dev_lit > scale * 2.0 / n);
}

TEST_CASE("nnn decay-part expansion") {
  const int n = 100;
  const double g = 0.001;

  // negative long-range correction for the slow modes
  for (int l = 1; l < n / 2; ++l) {
    CHECK(lri_gamma_correction(n, g, l) < 0.0);
  }

  // near-NNI limit reduces to the analytic series
  auto far = make_config(n, InteractionExponent::finite(60.0), g, {1, n});
  auto series = gamma_nnn_expansion(far);
  auto nni_series = gamma_first_order(nni_eigensystem(n).vectors,
                                      make_config(n, kNni, g, {1, n}),
                                      GammaSource::NniAnalytic);
  for (int i = 0; i < n; ++i) {
    CHECK(series.gammas[i] == Catch::Approx(nni_series.gammas[i]).margin(1e-18));
  }

  CHECK_THROWS_AS(gamma_nnn_expansion(make_config(n, kNni, g, {1, n})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      gamma_nnn_expansion(make_config(n, InteractionExponent::finite(5.0), g, {1, 50})),
      std::invalid_argument);

  // expansion equals 2 Gamma <1|Psi_l>^2 up to the quadratic remainder
  const double nuval = 5.0;
  auto nu = InteractionExponent::finite(nuval);
  const double w = std::pow(2.0, -nuval);
  for (int l = 1; l < n; ++l) {
    const double expand = nni_end_trap_gamma(n, g, l) + w * lri_gamma_correction(n, g, l);
    const double overlap = end_amplitude_nnn(l, n, nu);
    CHECK(std::abs(2.0 * g * overlap * overlap - expand) <= w * w * 4.0 * g / n * (1 + 1e-12));
  }
}

TEST_CASE("local exponent of sorted series") {
  GammaSeries quad{{}, GammaSource::NniAnalytic, make_config(8, kNni, 0.1, {1, 8})};
  for (int l = 1; l <= 8; ++l) quad.gammas.push_back(0.37 * l * l);
  for (int l = 1; l <= 7; ++l) CHECK(mu_local(quad, l) == Catch::Approx(2.0).margin(1e-12));

  const int n = 100;
  auto cfg = make_config(n, kNni, 0.001, {1, n});
  auto series = gamma_first_order(nni_eigensystem(n).vectors, cfg, GammaSource::NniAnalytic);
  CHECK(mu_local(series, 2) == Catch::Approx(2.0).margin(0.02));
  CHECK(mu_local(series, 10) == Catch::Approx(2.0).margin(0.05));
  // midband local exponent sits inside [1, 2] and decreases toward the
  // linear regime
  for (int l : {40, 45, 55, 60, 70}) {
    const double mu = mu_local(series, l);
    CHECK(mu >= 1.0);
    CHECK(mu <= 2.0);
  }
  CHECK(mu_local(series, 60) < mu_local(series, 10));

  GammaSeries zero{{0.0, 1.0, 2.0}, GammaSource::ExactDiag, cfg};
  CHECK_THROWS_AS(mu_local(zero, 1), std::domain_error);
  CHECK_THROWS_AS(mu_local(quad, 8), std::out_of_range);
}

TEST_CASE("analytic local exponent and its long-range shift") {
  const int n = 100;
  CHECK(mu_nni_analytic(n, 2) == Catch::Approx(2.0).margin(0.02));
  // the shift is strictly positive for slow modes: long-range couplings
  // push the exponent up
  for (int l = 1; l <= 10; ++l) CHECK(mu_lri_correction(n, l) > 0.0);

  // composite matches a direct local slope of the expanded series
  const double nuval = 8.0;
  const double w = std::pow(2.0, -nuval);
  for (int l = 2; l <= 10; ++l) {
    const double g_lo = nni_end_trap_gamma(n, 1.0, l) + w * lri_gamma_correction(n, 1.0, l);
    const double g_hi =
        nni_end_trap_gamma(n, 1.0, l + 1) + w * lri_gamma_correction(n, 1.0, l + 1);
    const double direct = (std::log(g_hi) - std::log(g_lo)) / (std::log(l + 1.0) - std::log(l));
    const double composite = mu_nni_analytic(n, l) + w * mu_lri_correction(n, l);
    CHECK(composite == Catch::Approx(direct).margin(w * w * 100));
  }
}

TEST_CASE("scaled bessel function") {
  CHECK(bessel_i0_scaled(0.0) == 1.0);
  // series against quadrature across both evaluation branches
  for (double lx = -3.0; lx <= 5.0; lx += 0.25) {
    const double x = std::pow(10.0, lx);
    const double a = bessel_i0_scaled(x);
    const double b = bessel_i0_scaled_quadrature(x);
    CHECK(std::abs(a - b) <= 1e-10 * b);
  }
  CHECK_THROWS_AS(bessel_i0_scaled(-1.0), std::invalid_argument);
}

TEST_CASE("continuum survival curve") {
  auto grid = TimeGrid::logspace(1e-2, 1e6, 20);
  auto curve = continuum_survival(0.04, grid);
  CHECK(curve.label == CurveLabel::ContinuumBessel);
  CHECK(curve.values.front() <= 1.0);
  for (std::size_t i = 1; i < curve.values.size(); ++i) {
    CHECK(curve.values[i] < curve.values[i - 1]);
  }
  // asymptotic tail: value -> 1/sqrt(2 pi a t)
  const double t = grid.points.back();
  CHECK(curve.values.back() ==
        Catch::Approx(1.0 / std::sqrt(2.0 * M_PI * 0.04 * t)).epsilon(1e-4));
  // slope -1/2 over late times
  auto fit = fit_decay_exponent(curve, 1e3 / 0.04, 1e5 / 0.04);
  CHECK(fit.exponent == Catch::Approx(-0.5).margin(0.01));

  TimeGrid zero_grid;
  zero_grid.points = {0.0, 1.0};
  zero_grid.spacing = GridSpacing::Linear;
  CHECK(continuum_survival(1.0, zero_grid).values[0] == 1.0);
  CHECK_THROWS_AS(continuum_survival(0.0, grid), std::invalid_argument);
  CHECK_THROWS_AS(continuum_survival(-2.0, grid), std::invalid_argument);

  // quadrature-backed evaluation agrees
  auto quad = continuum_survival(0.04, grid, BesselMethod::Quadrature);
  for (std::size_t i = 0; i < quad.values.size(); ++i) {
    CHECK(std::abs(quad.values[i] - curve.values[i]) <= 1e-10 * curve.values[i]);
  }
}

#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "fvlab/complete_graph.hpp"
#include "fvlab/oracle.hpp"
#include "fvlab/two_point.hpp"
#include "helpers.hpp"

using namespace fvlab;

TEST_CASE("enumeration order and sizes") {
  const auto s = enumerate_configurations(2, 2);
  REQUIRE(s.size() == 3);
  CHECK(s.configs[0] == Configuration{2, 0});
  CHECK(s.configs[1] == Configuration{1, 1});
  CHECK(s.configs[2] == Configuration{0, 2});
  CHECK(s.find({1, 1}) == 1);
  CHECK(enumerate_configurations(3, 2).size() == 6);
  CHECK(enumerate_configurations(2, 5).size() == 6);
  for (int K = 2; K <= 5; ++K)
    for (int N = 1; N <= 6; ++N) CHECK(enumerate_configurations(K, N).size() == binomial(N + K - 1, K - 1));
  CHECK_THROWS_AS(enumerate_configurations(10, 50), InvalidModel);
  CHECK_THROWS_AS(s.find({2, 1}), InvalidModel);
}

TEST_CASE("generator matrix") {
  const Model m = cg_model(2, 1.0);
  const Eigen::MatrixXd L = generator_matrix(m, 2);
  CHECK(L(1, 0) == doctest::Approx(1.5));
  CHECK(L(1, 2) == doctest::Approx(1.5));
  CHECK(L(0, 1) == doctest::Approx(0.5 * 2 * 1.0 + 0.0));
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Model r = testing::random_model(gen, 3);
    const Eigen::MatrixXd G = generator_matrix(r, 4);
    CHECK(G.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    for (int a = 0; a < G.rows(); ++a)
      for (int b = 0; b < G.cols(); ++b)
        if (a != b) CHECK(G(a, b) >= 0.0);
  }
}

TEST_CASE("stationary_exact") {
  Eigen::VectorXd pi = stationary_exact(cg_model(2, 1.0), 2);
  CHECK(pi(0) == doctest::Approx(0.375));
  CHECK(pi(1) == doctest::Approx(0.25));
  CHECK(pi(2) == doctest::Approx(0.375));
  pi = stationary_exact(cg_model(2, 0.5), 2);
  for (int a = 0; a < 3; ++a) CHECK(pi(a) == doctest::Approx(1.0 / 3));

  // the site-1 marginal of the two-point system is the birth-death law
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(gen), b = u(gen), p1 = u(gen), p2 = u(gen);
    const int N = 2 + trial;
    const auto space = enumerate_configurations(2, N);
    const Eigen::VectorXd full = stationary_exact(generator_matrix(tp_model(a, b, p1, p2), N, space));
    const Eigen::VectorXd bd = bd_invariant(bd_marginal(a, b, p1, p2, N));
    Eigen::VectorXd marg = Eigen::VectorXd::Zero(N + 1);
    for (int x = 0; x < space.size(); ++x) marg(space.configs[x][0]) += full(x);
    CHECK((marg - bd).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((stationary_exact(bd_generator(bd_marginal(a, b, p1, p2, N))) - bd).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("uniformization agrees with the dense matrix exponential") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Model m = testing::random_model(gen, 3);
    const Eigen::MatrixXd L = generator_matrix(m, 3);
    for (double t : {0.0, 0.3, 2.0, 15.0}) {
      const Eigen::MatrixXd E = (L * t).exp();
      Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(L.rows());
      v(trial % L.rows()) = 1.0;
      CHECK((evolve_distribution(L, v, t) - v * E).cwiseAbs().maxCoeff() <= 1e-11);
      const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(L.rows(), -1.0, 2.0);
      CHECK((apply_semigroup(L, f, t) - E * f).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  CHECK_THROWS_AS(evolve_distribution(Eigen::MatrixXd::Zero(2, 2), Eigen::RowVector2d(1, 0), -1.0), InvalidModel);
}

TEST_CASE("transient covariance") {
  const Model m = cg_model(2, 1.0);
  CHECK(transient_covariance(m, 2, {2, 0}, 0, 1, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(transient_covariance(m, 2, {2, 0}, 0, 1, 40.0) == doctest::Approx(-0.75).epsilon(1e-10));
}

TEST_CASE("spectra of small generators") {
  Eigen::VectorXd ev = spectrum(generator_matrix(cg_model(2, 1.0), 2));
  CHECK(ev(0) == doctest::Approx(-4.0));
  CHECK(ev(1) == doctest::Approx(-1.0));
  CHECK(ev(2) == doctest::Approx(0.0).epsilon(1e-12));

  const auto chain = bd_marginal(1, 1, 1, 1, 2);
  ev = spectrum(bd_generator(chain));
  CHECK(ev(0) == doctest::Approx(-6.0));
  CHECK(ev(1) == doctest::Approx(-2.0));
  CHECK(std::abs(ev(2)) <= 1e-12);

  const Eigen::VectorXd rev = reversible_spectrum(bd_generator(chain), bd_invariant(chain));
  CHECK((rev - ev).cwiseAbs().maxCoeff() <= 1e-12);

  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd s = spectrum(generator_matrix(testing::random_model(gen, 3), 3));
    CHECK(s.cwiseAbs().minCoeff() <= 1e-10);
  }
}

TEST_CASE("spectral gap is at least rho when rho > 0") {
  std::mt19937_64 gen(19);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Model m = testing::random_model(gen, 2 + trial % 3, 0.5, 2.0, 0.4);
    if (ergodic_coefficients(m).rho <= 0.0) continue;
    const Eigen::VectorXd s = spectrum(generator_matrix(m, 3));
    double gap = std::numeric_limits<double>::infinity();
    for (double v : s)
      if (v < -1e-9) gap = std::min(gap, -v);
    CHECK(gap >= ergodic_coefficients(m).rho - 1e-9);
    ++tested;
  }
  CHECK(tested > 20);
}

TEST_CASE("carre du champ") {
  const Model m = cg_model(2, 1.0);
  CHECK(carre_du_champ(m, 2, [](const Configuration&) { return 3.0; }, {1, 1}) == 0.0);
  CHECK(carre_du_champ(m, 2, [](const Configuration& e) { return double(e[0]); }, {1, 1}) == doctest::Approx(3.0));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-2, 2);
  const Model r = testing::random_model(gen, 3);
  const auto space = enumerate_configurations(3, 4);
  const Eigen::MatrixXd L = generator_matrix(r, 4, space);
  Eigen::VectorXd f(space.size());
  for (int a = 0; a < space.size(); ++a) f(a) = u(gen);
  const Eigen::VectorXd g = carre_du_champ_from_generator(L, f);
  for (int a = 0; a < space.size(); ++a) {
    const double local = carre_du_champ(r, 4, [&](const Configuration& e) { return f(space.find(e)); }, space.configs[a]);
    CHECK(local == doctest::Approx(g(a)).epsilon(1e-12));
    CHECK(local >= 0.0);
  }
}

TEST_CASE("variance equals the integrated carre du champ along the semigroup") {
  std::mt19937_64 gen(77);
  const Model m = testing::random_model(gen, 3);
  const int N = 3;
  const auto space = enumerate_configurations(3, N);
  const Eigen::MatrixXd L = generator_matrix(m, N, space);
  Eigen::VectorXd f(space.size());
  for (int a = 0; a < space.size(); ++a) f(a) = space.configs[a][0] * 1.0 - 0.5 * space.configs[a][2];
  const double t = 1.2;
  const int start = 0;

  const Eigen::VectorXd St_f = apply_semigroup(L, f, t);
  const Eigen::VectorXd St_f2 = apply_semigroup(L, f.cwiseProduct(f), t);
  const double direct = St_f2(start) - St_f(start) * St_f(start);

  // Simpson's rule on s in [0, t] for S_s Gamma(S_{t-s} f)
  const int n = 200;
  const double h = t / n;
  double integral = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = k * h;
    const Eigen::VectorXd inner = apply_semigroup(L, f, t - s);
    const double v = apply_semigroup(L, carre_du_champ_from_generator(L, inner), s)(start);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w * v;
  }
  integral *= h / 3.0;
  CHECK(std::abs(integral - direct) <= 1e-6 * std::abs(direct));
}

#include <doctest.h>

#include <random>

#include "fvlab/complete_graph.hpp"
#include "fvlab/model.hpp"
#include "fvlab/two_point.hpp"
#include "helpers.hpp"

using namespace fvlab;

namespace {

Model two_state(double a, double b, double p1, double p2) {
  Eigen::MatrixXd Q(2, 2);
  Q << 0, a, b, 0;
  Eigen::VectorXd p0(2);
  p0 << p1, p2;
  return make_model(Q, p0);
}

std::string error_of(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p0) {
  try {
    make_model(Q, p0);
  } catch (const InvalidModel& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("validate_model accepts a two-state chain and zeroes the diagonal") {
  Eigen::MatrixXd Q(2, 2);
  Q << 7, 1, 2, 9;
  Eigen::VectorXd p0(2);
  p0 << 3, 1;
  const Model m = make_model(Q, p0);
  CHECK(m.K == 2);
  CHECK(m.Q(0, 0) == 0.0);
  CHECK(m.Q(1, 1) == 0.0);
  CHECK(m.Q(0, 1) == 1.0);
}

TEST_CASE("validate_model rejects broken models with the invariant named") {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK(error_of(Z, ones).find("reducible Q") != std::string::npos);

  Eigen::MatrixXd Q(2, 2);
  Q << 0, 1, 1, 0;
  CHECK(error_of(Q, Eigen::VectorXd::Zero(2)).find("p0 identically zero") != std::string::npos);

  Eigen::MatrixXd neg = Q;
  neg(0, 1) = -1;
  CHECK(error_of(neg, ones).find("negative") != std::string::npos);

  CHECK(error_of(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)).find("K < 2") != std::string::npos);

  // 0 -> 1 -> 2 but nothing returns to 0
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(3, 3);
  chain(0, 1) = chain(1, 2) = chain(2, 1) = 1;
  CHECK(error_of(chain, Eigen::VectorXd::Ones(3)).find("reducible Q") != std::string::npos);
}

TEST_CASE("ergodic coefficients of the reference models") {
  auto c = ergodic_coefficients(cg_model(5, 0.7));
  CHECK(c.lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.alpha == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.rho == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.rho_prime == doctest::Approx(1.0).epsilon(1e-14));

  c = ergodic_coefficients(two_state(1, 2, 3, 1));
  CHECK(c.lambda == doctest::Approx(3.0));
  CHECK(c.rho == doctest::Approx(1.0));
  CHECK(c.rho_prime == doctest::Approx(1.0));

  CHECK(ergodic_coefficients(two_state(1, 2, 5, 1)).rho == doctest::Approx(-1.0));
  CHECK(std::string(ErgodicCoefficients::kPairConvention) == "i != i'");
}

TEST_CASE("ergodic coefficient inequalities on random models") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + trial % 5;
    const Model m = testing::random_model(gen, K, 0.0, 2.0);
    const auto c = ergodic_coefficients(m);
    CHECK(c.lambda >= c.alpha - 1e-12);
    CHECK(c.rho_prime >= c.rho - 1e-12);
    CHECK(c.rho == doctest::Approx(c.lambda - (m.p0.maxCoeff() - m.p0.minCoeff())));
  }
  // constant killing: rho = rho' = lambda
  for (int trial = 0; trial < 50; ++trial) {
    Model m = testing::random_model(gen, 4);
    m = make_model(m.Q, Eigen::VectorXd::Constant(4, 0.8));
    const auto c = ergodic_coefficients(m);
    CHECK(c.rho == doctest::Approx(c.lambda));
    CHECK(c.rho_prime == doctest::Approx(c.lambda));
  }
}

TEST_CASE("d1 distance") {
  CHECK(d1_distance({2, 0}, {2, 0}) == 0.0);
  CHECK(d1_distance({2, 0}, {0, 2}) == 2.0);
  CHECK(d1_distance({3, 1, 0}, {1, 1, 2}) == 2.0);
  CHECK_THROWS_AS(d1_distance({1, 1}, {1, 1, 0}), InvalidModel);
  CHECK_THROWS_AS(d1_distance({1, 1}, {2, 1}), InvalidModel);
}

TEST_CASE("d1 is a metric and equals N times the TV of empirical measures") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 2 + trial % 4, N = 2 + trial % 9;
    const auto x = testing::random_configuration(gen, K, N);
    const auto y = testing::random_configuration(gen, K, N);
    const auto z = testing::random_configuration(gen, K, N);
    CHECK(d1_distance(x, y) == d1_distance(y, x));
    CHECK(d1_distance(x, z) <= d1_distance(x, y) + d1_distance(y, z));
    CHECK((d1_distance(x, y) == 0.0) == (x == y));
    CHECK(d1_distance(x, y) == doctest::Approx(N * total_variation(empirical_measure(x), empirical_measure(y))));
  }
}

TEST_CASE("total variation") {
  Eigen::Vector2d a(1, 0), b(0, 1), c(0.5, 0.5), d(0.75, 0.25);
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == 1.0);
  CHECK(total_variation(c, d) == doctest::Approx(0.25));
  CHECK_THROWS_AS(total_variation(a, Eigen::Vector3d(1, 0, 0)), InvalidModel);
  CHECK_THROWS_AS(total_variation(a, Eigen::Vector2d(0.5, 0.6)), InvalidModel);
}

TEST_CASE("configuration checks") {
  CHECK_NOTHROW(check_configuration({1, 2, 0}, 3, 3));
  CHECK_THROWS_AS(check_configuration({1, 2}, 3, 3), InvalidModel);
  CHECK_THROWS_AS(check_configuration({1, 1, 0}, 3, 3), InvalidModel);
  CHECK_THROWS_AS(check_configuration({-1, 4, 0}, 3, 3), InvalidModel);
}

TEST_CASE("model JSON round trip") {
  const Model m = two_state(1, 2, 3, 1);
  const auto j = model_to_json(m);
  CHECK(j["K"] == 2);
  const Model back = model_from_json(j);
  CHECK(back.Q == m.Q);
  CHECK(back.p0 == m.p0);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"K", 2}, {"Q", {{0, 0}, {0, 0}}}, {"p0", {1, 1}}}), InvalidModel);
}

#include <doctest.h>

#include <cmath>

#include "fvlab/bounds.hpp"
#include "fvlab/complete_graph.hpp"
#include "fvlab/coupling.hpp"
#include "fvlab/simulator.hpp"
#include "fvlab/two_point.hpp"

using namespace fvlab;

TEST_CASE("bound constants") {
  for (int K : {2, 3, 7}) {
    const auto c = bound_constants(cg_model(K, 0.4));
    CHECK(c.Q1 == doctest::Approx((K - 1.0) / K));
    CHECK(c.p_sup == doctest::Approx(0.4));
    CHECK(c.B == doctest::Approx((K - 1.0) / K + 0.8));
  }
  const auto c = bound_constants(tp_model(1, 2, 3, 1));
  CHECK(c.Q1 == 2.0);
  CHECK(c.p_sup == 3.0);
  CHECK(c.B == 8.0);
  CHECK(c.rho == doctest::Approx(1.0));
  const auto j = to_json(c);
  CHECK(j["B"].get<double>() == 8.0);
}

TEST_CASE("covariance bound") {
  const Model cg = cg_model(2, 1.0);
  auto b = covariance_bound(cg, 10, 0.0);
  CHECK(b.pair_bound == 0.0);
  CHECK(b.lipschitz_bound == 0.0);
  b = covariance_bound(cg, 10, 1e3);
  CHECK(b.pair_bound == doctest::Approx(1.0 / 3));
  CHECK(b.lipschitz_bound == doctest::Approx(0.5 * (10 * 0.5 + 100.0 / 9)));

  // rho = 0 exactly for (1, 2, 3, 0)
  const Model flat = tp_model(1, 2, 3, 0);
  CHECK(bound_constants(flat).rho == 0.0);
  b = covariance_bound(flat, 5, 0.7);
  CHECK(b.pair_bound == doctest::Approx(2.0 * (2 + 3) / 4 * 1.4));
  CHECK(contraction_factor(0.0, 0.7) == 1.4);
  CHECK(contraction_factor(1e-9, 0.7) == doctest::Approx(1.4).epsilon(1e-8));
  CHECK(contraction_factor(-1e-9, 0.7) == doctest::Approx(1.4).epsilon(1e-8));

  // rho < 0: the bound grows with t
  const Model neg = tp_model(1, 2, 5, 1);
  CHECK(covariance_bound(neg, 5, 2.0).pair_bound > covariance_bound(neg, 5, 1.0).pair_bound);
  CHECK_THROWS_AS(covariance_bound(cg, 1, 1.0), InvalidModel);
  CHECK_THROWS_AS(covariance_bound(cg, 5, -1.0), InvalidModel);
}

TEST_CASE("chaos bound") {
  const Model m = cg_model(3, 1.0);
  const double B = bound_constants(m).B;
  CHECK(chaos_bound(m, 25, 0.0, 2.0, 0.0) == doctest::Approx(0.4));
  CHECK(chaos_bound(m, 25, 1.4, 2.0, 0.1) / chaos_bound(m, 25, 0.7, 2.0, 0.1) == doctest::Approx(std::exp(B * 0.7)));
  CHECK(chaos_bound(m, 100, 0.5, 1.0, 0.0) / chaos_bound(m, 25, 0.5, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(chaos_bound(m, 10, 0.0, 0.0, 0.0), InvalidModel);
  CHECK_THROWS_AS(chaos_bound(m, 10, 0.0, 1.0, 1.5), InvalidModel);
}

TEST_CASE("uniform bound") {
  const Model cg = cg_model(2, 1.0);
  // (3.5/2.5) * (2.5/10)^(1/3.5)
  CHECK(uniform_bound(cg, 101, 1.0) == doctest::Approx(1.4 * std::pow(0.25, 1.0 / 3.5)).epsilon(1e-14));
  CHECK(uniform_bound(cg, 101, 1.0) == doctest::Approx(0.94213).epsilon(1e-5));

  const double gamma = 1.0 / 3.5;
  CHECK(uniform_bound(cg, 401, 1.0) / uniform_bound(cg, 101, 1.0) == doctest::Approx(std::pow(0.25, gamma / 2)));

  // rho stays 1 while B = 0.5 + 2p grows: the bound tends to 1
  double prev = std::abs(uniform_bound(cg_model(2, 10.0), 101, 1.0) - 1.0);
  for (double p : {100.0, 1e3, 1e4}) {
    const double d = std::abs(uniform_bound(cg_model(2, p), 101, 1.0) - 1.0);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-2);

  CHECK_THROWS_WITH_AS(uniform_bound(tp_model(1, 2, 3, 0), 10, 1.0), doctest::Contains("not applicable"),
                       InvalidModel);
  CHECK_THROWS_AS(uniform_bound(tp_model(1, 2, 5, 1), 10, 1.0), InvalidModel);
}

TEST_CASE("coalescence bound") {
  CHECK(coalescence_tv_bound(0.7, 0.0, 3.0) == 3.0);
  CHECK(coalescence_tv_bound(0.7, 2.0, 0.0) == 0.0);
  CHECK(coalescence_tv_bound(1.0, std::log(2.0), 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(coalescence_tv_bound(1.0, 1.0, -1.0), InvalidModel);
}

TEST_CASE("Monte Carlo covariances respect the pair bound") {
  const Model m = cg_model(3, 1.0);
  const int N = 6;
  const std::vector<double> times{0.25, 1.0, 3.0};
  const auto stats = ensemble_statistics({m, N, 3.0, 5, 2000}, {6, 0, 0}, times);
  for (std::size_t t = 0; t < times.size(); ++t) {
    const double bound = covariance_bound(m, N, times[t]).pair_bound;
    CHECK(std::abs(stats.covariance[t](0, 1)) / (N * N) <= bound + 3.0 * stats.covariance_se[t](0, 1) / (N * N));
  }
}

TEST_CASE("expected coupling distance respects the coalescence bound") {
  const Model m = cg_model(3, 1.0);
  const auto curve = wasserstein_decay(m, 6, {{6, 0, 0}, {0, 6, 0}}, {0.0, 0.5, 1.0, 2.0}, 2000, 9);
  for (std::size_t t = 0; t < curve.times.size(); ++t)
    CHECK(curve.estimate[t] <= coalescence_tv_bound(1.0, curve.times[t], 6.0) + 3.0 * curve.std_error[t]);
}

#ifndef FVLAB_TEST_HELPERS_HPP
#define FVLAB_TEST_HELPERS_HPP

#include <random>

#include "fvlab/model.hpp"

namespace testing {

// Off-diagonal rates in [lo, hi], killing in [0, pmax] with at least one positive entry.
inline fvlab::Model random_model(std::mt19937_64& gen, int K, double lo = 0.1, double hi = 2.0,
                                 double pmax = 2.0) {
  std::uniform_real_distribution<double> q(lo, hi), p(0.0, pmax);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      if (i != j) Q(i, j) = q(gen);
  Eigen::VectorXd p0(K);
  for (int i = 0; i < K; ++i) p0(i) = p(gen);
  p0(0) += 0.05;
  return fvlab::make_model(Q, p0);
}

inline fvlab::Configuration random_configuration(std::mt19937_64& gen, int K, int N) {
  fvlab::Configuration eta(K, 0);
  std::uniform_int_distribution<int> site(0, K - 1);
  for (int n = 0; n < N; ++n) ++eta[site(gen)];
  return eta;
}

inline Eigen::VectorXd random_probability(std::mt19937_64& gen, int K) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Eigen::VectorXd v(K);
  for (int i = 0; i < K; ++i) v(i) = u(gen);
  return v / v.sum();
}

}  // namespace testing

#endif

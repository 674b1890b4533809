#ifndef FVLAB_COMPLETE_GRAPH_HPP
#define FVLAB_COMPLETE_GRAPH_HPP

#include <vector>

#include "fvlab/model.hpp"
#include "fvlab/oracle.hpp"

// Random walk on the complete graph with K sites: Q(i,j) = 1/K for i != j
// and constant killing rate p.

namespace fvlab {

struct CompleteGraphParams {
  int K = 2;
  int N = 2;
  double p = 1.0;
};

void check_params(const CompleteGraphParams& params);

Model cg_model(int K, double p);

/// Unnormalized invariant weight prod_i prod_{j < eta(i)} (N - 1 + K p j) / (j + 1).
double cg_invariant_weight(const CompleteGraphParams& params, const Configuration& eta);

/// Invariant (reversible) law in the order of enumerate_configurations(K, N).
Eigen::VectorXd cg_invariant(const CompleteGraphParams& params);

/// Closed-form normalizer binom((K+1)N - K - 1, KN - K - 1) of the product of
/// binom(N - 2 + eta(i), N - 2), valid when p = 1/K.
double cg_normalizer_uniform_killing(int K, int N);

/// P(eta(i) = x) under the invariant law when p = 1/K.
double cg_marginal_law(int K, int N, int x);

struct StationaryMoments {
  double variance = 0.0;    // var(eta(i))
  double covariance = 0.0;  // cov(eta(i), eta(j)), i != j
  double chaos_bound = 0.0; // bound on E[TV(m(eta), uniform)]
};

StationaryMoments cg_stationary_moments(const CompleteGraphParams& params);

/// cov(eta_t(k), eta_t(l)), k != l, from the deterministic start eta0, by
/// solving the closed linear ODE system for E[eta_t(k)] and
/// E[eta_t(k) eta_t(l)].
double cg_dynamic_covariance(const CompleteGraphParams& params, const Configuration& eta0, double t,
                             int k = 0, int l = 1);

/// The printed closed-form expression for the same covariance. It does not
/// vanish at t = 0 for deterministic starts; kept only to report that.
double cg_printed_dynamic_covariance(const CompleteGraphParams& params, const Configuration& eta0,
                                     double t, int k = 0, int l = 1);

/// lambda_l = l + l(l-1)p/(N-1).
double cg_level(const CompleteGraphParams& params, int l);

/// Sorted, de-duplicated sums lambda_{l_1} + ... + lambda_{l_K} over
/// l_i >= 0 with sum l_i <= N. Includes the marginal eigenvalues
/// lambda_0..lambda_N.
std::vector<double> cg_spectrum(const CompleteGraphParams& params);

struct SpectrumInclusion {
  Eigen::VectorXd exact;        // spectrum of -L, ascending
  double max_distance = 0.0;    // max over exact eigenvalues of the distance to the candidate set
  double smallest_positive = 0.0;
};

/// Compares the exact spectrum of -L (reversible eigensolve) with cg_spectrum.
SpectrumInclusion cg_spectrum_inclusion(const CompleteGraphParams& params);

}  // namespace fvlab

#endif  // FVLAB_COMPLETE_GRAPH_HPP

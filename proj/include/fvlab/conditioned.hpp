#ifndef FVLAB_CONDITIONED_HPP
#define FVLAB_CONDITIONED_HPP

#include "fvlab/model.hpp"

namespace fvlab {

/// Sub-generator of the killed chain on the live states: off-diagonal Q,
/// diagonal -(p0(i) + sum_j Q(i,j)). Row sums equal -p0.
Eigen::MatrixXd killed_generator(const Model& model);

struct ConditionedLaw {
  Eigen::VectorXd mu_t;
  double method_gap = 0.0;  // max |linear route - nonlinear ODE route|
};

/// Law at time t of the killed chain started from mu0 and conditioned on
/// survival. mu_t comes from uniformization of v' = vM followed by
/// normalization; method_gap compares it with an RK4 integration (step
/// <= dt) of the nonlinear forward equation, renormalized every step.
ConditionedLaw conditioned_evolution(const Model& model, const Eigen::VectorXd& mu0, double t, double dt);

/// Linear route only.
Eigen::VectorXd conditioned_law(const Model& model, const Eigen::VectorXd& mu0, double t);

struct QsdResult {
  Eigen::VectorXd nu;
  double theta = 0.0;  // extinction rate
};

/// Quasi-stationary distribution: normalized left Perron vector of M, by
/// power iteration on I + M / c with c = 1.01 * max |M(i,i)|.
QsdResult qsd(const Model& model, long max_iterations = 10'000'000);

nlohmann::json to_json(const QsdResult& result);

struct TwoPointSpectral {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double gap = 0.0;
  Eigen::VectorXd nu_numeric;
  Eigen::VectorXd nu_printed;  // (a, -A + sqrt(A^2 + 4ab)) normalized
  double printed_formula_discrepancy = 0.0;
};

/// Closed-form eigenvalues of the 2x2 killed generator, the numeric QSD, and
/// the TV distance between it and the normalized printed eigenvector
/// formula (which is not the QSD in general; reported, not used).
TwoPointSpectral two_point_spectral(double a, double b, double p1, double p2);

}  // namespace fvlab

#endif  // FVLAB_CONDITIONED_HPP

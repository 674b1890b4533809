#include "fvlab/conditioned.hpp"

#include <cmath>
#include <limits>

#include "fvlab/oracle.hpp"
#include "fvlab/two_point.hpp"

namespace fvlab {

Eigen::MatrixXd killed_generator(const Model& model) {
  Eigen::MatrixXd M = model.Q;
  for (int i = 0; i < model.K; ++i) {
    M(i, i) = 0.0;
    M(i, i) = -(model.p0(i) + M.row(i).sum());
  }
  return M;
}

Eigen::VectorXd conditioned_law(const Model& model, const Eigen::VectorXd& mu0, double t) {
  const Eigen::MatrixXd M = killed_generator(model);
  Eigen::RowVectorXd v = evolve_distribution(M, mu0.transpose(), t);
  return (v / v.sum()).transpose();
}

ConditionedLaw conditioned_evolution(const Model& model, const Eigen::VectorXd& mu0, double t, double dt) {
  if (mu0.size() != model.K) throw InvalidModel("conditioned_evolution: mu0 has the wrong length");
  if (!(t >= 0.0)) throw InvalidModel("conditioned_evolution: t must be >= 0");
  if (t > 0.0 && !(dt > 0.0 && dt <= t)) throw InvalidModel("conditioned_evolution: need 0 < dt <= t");

  ConditionedLaw out;
  out.mu_t = conditioned_law(model, mu0, t);
  if (t == 0.0) return out;

  const Eigen::MatrixXd M = killed_generator(model);
  const Eigen::RowVectorXd p0 = model.p0.transpose();
  // d/dt v = v M + (v . p0) v
  auto rhs = [&](const Eigen::RowVectorXd& v) -> Eigen::RowVectorXd { return v * M + v.dot(p0) * v; };
  const long steps = static_cast<long>(std::ceil(t / dt - 1e-9));
  const double h = t / steps;
  Eigen::RowVectorXd v = mu0.transpose();
  for (long s = 0; s < steps; ++s) {
    const Eigen::RowVectorXd k1 = rhs(v);
    const Eigen::RowVectorXd k2 = rhs(v + 0.5 * h * k1);
    const Eigen::RowVectorXd k3 = rhs(v + 0.5 * h * k2);
    const Eigen::RowVectorXd k4 = rhs(v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    v /= v.sum();
    if (!v.allFinite()) throw InvalidModel("conditioned_evolution: ODE step size failure (non-finite values)");
  }
  out.method_gap = (v.transpose() - out.mu_t).cwiseAbs().maxCoeff();
  return out;
}

QsdResult qsd(const Model& model, long max_iterations) {
  const Eigen::MatrixXd M = killed_generator(model);
  const double c = 1.01 * M.diagonal().cwiseAbs().maxCoeff();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(model.K, model.K) + M / c;
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(model.K, 1.0 / model.K);
  bool converged = false;
  for (long it = 0; it < max_iterations; ++it) {
    Eigen::RowVectorXd next = v * P;
    next /= next.sum();
    const double change = (next - v).cwiseAbs().sum();
    v = next;
    if (change <= 8.0 * std::numeric_limits<double>::epsilon() * model.K) {
      converged = true;
      break;
    }
  }
  QsdResult out;
  out.nu = v.transpose();
  out.theta = v.dot(model.p0.transpose());
  const double residual = (v * M + out.theta * v).cwiseAbs().maxCoeff();
  if (!converged && residual > 1e-10) throw InvalidModel("qsd: power iteration did not converge");
  return out;
}

nlohmann::json to_json(const QsdResult& result) {
  return {{"nu", std::vector<double>(result.nu.data(), result.nu.data() + result.nu.size())},
          {"theta", result.theta}};
}

TwoPointSpectral two_point_spectral(double a, double b, double p1, double p2) {
  const Model model = tp_model(a, b, p1, p2);
  TwoPointSpectral s;
  const double A = a - b + p1 - p2;
  const double root = std::sqrt(A * A + 4.0 * a * b);
  s.lambda_plus = (-(a + b + p1 + p2) + root) / 2.0;
  s.lambda_minus = (-(a + b + p1 + p2) - root) / 2.0;
  s.gap = s.lambda_plus - s.lambda_minus;
  s.nu_numeric = qsd(model).nu;
  Eigen::Vector2d printed(a, -A + root);
  s.nu_printed = printed / printed.sum();
  s.printed_formula_discrepancy = 0.5 * (s.nu_numeric - s.nu_printed).cwiseAbs().sum();
  return s;
}

}  // namespace fvlab

#include "fvlab/bounds.hpp"

#include <cmath>

namespace fvlab {

BoundConstants bound_constants(const Model& model) {
  BoundConstants c;
  for (int i = 0; i < model.K; ++i) c.Q1 = std::max(c.Q1, model.out_rate(i));
  c.p_sup = model.p0.maxCoeff();
  c.B = c.Q1 + 2.0 * c.p_sup;
  c.rho = ergodic_coefficients(model).rho;
  return c;
}

double contraction_factor(double rho, double t) {
  if (rho == 0.0) return 2.0 * t;
  return -std::expm1(-2.0 * rho * t) / rho;
}

CovarianceBound covariance_bound(const Model& model, int N, double t) {
  if (N < 2) throw InvalidModel("covariance_bound requires N >= 2");
  if (!(t >= 0.0)) throw InvalidModel("covariance_bound requires t >= 0");
  const auto c = bound_constants(model);
  const double f = contraction_factor(c.rho, t);
  CovarianceBound out;
  out.pair_bound = 2.0 * (c.Q1 + c.p_sup) / (N - 1) * f;
  out.lipschitz_bound = f / 2.0 * (N * c.Q1 + c.p_sup * double(N) * N / (N - 1));
  return out;
}

double chaos_bound(const Model& model, int N, double t, double C, double tv0) {
  if (!(C > 0.0)) throw InvalidModel("chaos_bound requires C > 0");
  if (tv0 < 0.0 || tv0 > 1.0) throw InvalidModel("chaos_bound requires tv0 in [0, 1]");
  const auto c = bound_constants(model);
  return C * std::exp(c.B * t) * (1.0 / std::sqrt(double(N)) + tv0);
}

double uniform_bound(const Model& model, int N, double C) {
  const auto c = bound_constants(model);
  if (!(c.rho > 0.0)) throw InvalidModel("uniform_bound: criterion not applicable (rho <= 0)");
  if (N < 2) throw InvalidModel("uniform_bound requires N >= 2");
  if (!(C > 0.0)) throw InvalidModel("uniform_bound requires C > 0");
  const double gamma = c.rho / (c.B + c.rho);
  return (c.B + c.rho) / c.B * std::pow(c.B * C / (c.rho * std::sqrt(double(N - 1))), gamma);
}

double coalescence_tv_bound(double rho, double t, double w0) {
  if (w0 < 0.0) throw InvalidModel("coalescence_tv_bound requires w0 >= 0");
  return std::exp(-rho * t) * w0;
}

nlohmann::json to_json(const BoundConstants& c) {
  return {{"Q1", c.Q1}, {"p_sup", c.p_sup}, {"B", c.B}, {"rho", c.rho}};
}

}  // namespace fvlab

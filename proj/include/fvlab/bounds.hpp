#ifndef FVLAB_BOUNDS_HPP
#define FVLAB_BOUNDS_HPP

#include "fvlab/model.hpp"

namespace fvlab {

struct BoundConstants {
  double Q1 = 0.0;     // sup_i sum_{j != i} Q(i,j)
  double p_sup = 0.0;  // sup p0
  double B = 0.0;      // Q1 + 2 p_sup
  double rho = 0.0;
};

BoundConstants bound_constants(const Model& model);

/// (1 - exp(-2 rho t)) / rho, equal to 2t at rho == 0.
double contraction_factor(double rho, double t);

struct CovarianceBound {
  double pair_bound = 0.0;       // bound on |cov(eta_t(k)/N, eta_t(l)/N)|
  double lipschitz_bound = 0.0;  // bound on |cov(g(eta_t), h(eta_t))|, g,h 1-Lipschitz for d1
};

CovarianceBound covariance_bound(const Model& model, int N, double t);

/// C e^{Bt} (1/sqrt(N) + tv0). C is supplied by the caller.
double chaos_bound(const Model& model, int N, double t, double C, double tv0);

/// Time-uniform bound ((B + rho)/B) (B C / (rho sqrt(N-1)))^{rho/(B+rho)}.
/// Throws when rho <= 0 (criterion not applicable).
double uniform_bound(const Model& model, int N, double C);

/// e^{-rho t} w0.
double coalescence_tv_bound(double rho, double t, double w0);

nlohmann::json to_json(const BoundConstants& c);

}  // namespace fvlab

#endif  // FVLAB_BOUNDS_HPP

#ifndef FVLAB_TWO_POINT_HPP
#define FVLAB_TWO_POINT_HPP

#include <vector>

#include "fvlab/model.hpp"

// Two-state model: Q(1,2) = a, Q(2,1) = b, killing rates p1, p2. The number
// of particles on site 1 is itself a birth-death chain on {0..N}.

namespace fvlab {

Model tp_model(double a, double b, double p1, double p2);

struct BirthDeathChain {
  int N = 0;
  std::vector<double> b;  // b_0..b_{N-1}
  std::vector<double> d;  // d_1..d_N, stored at d[n - 1]

  double birth(int n) const { return n >= 0 && n < N ? b[n] : 0.0; }
  double death(int n) const { return n >= 1 && n <= N ? d[n - 1] : 0.0; }
};

void check_chain(const BirthDeathChain& chain);

/// b_n = (N-n)(b + p2 n/(N-1)), d_n = n(a + p1 (N-n)/(N-1)).
BirthDeathChain bd_marginal(double a, double b, double p1, double p2, int N);

/// Dense (N+1)x(N+1) generator of the chain.
Eigen::MatrixXd bd_generator(const BirthDeathChain& chain);

Eigen::VectorXd bd_invariant(const BirthDeathChain& chain);

/// max_n |pi(n) b_n - pi(n+1) d_{n+1}|.
double detailed_balance_residual(const BirthDeathChain& chain, const Eigen::VectorXd& pi);

/// pi(i+1)/pi(i) strictly decreasing in i.
bool is_unimodal(const BirthDeathChain& chain);

struct HardyPair {
  double B_plus = 0.0;
  double B_minus = 0.0;
};

HardyPair hardy_quantities(const BirthDeathChain& chain, int i);

struct HardyReport {
  int i_star = 0;
  double B_plus = 0.0;
  double B_minus = 0.0;
  double gap_lower_bound = 0.0;
  double i1 = 0.0;  // NaN when undefined (p1 == p2 or negative discriminant)
  double i2 = 0.0;
  bool unimodal = false;
};

struct HardyRoots {
  double discriminant = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
};

/// Roots i1 <= i2 of the quadratic locating the mode of pi. Requires p1 != p2.
HardyRoots hardy_roots(double a, double b, double p1, double p2, int N);

HardyReport gap_report(double a, double b, double p1, double p2, int N);

nlohmann::json to_json(const HardyReport& report);

/// min_k [d_{k+1} - d_k u_{k-1}/u_k + b_k - b_{k+1} u_{k+1}/u_k], k = 0..N-1.
double lambda_u(const BirthDeathChain& chain, const std::vector<double>& u);

inline constexpr int kMaxBirthDeathSize = 5000;

/// Smallest nonzero eigenvalue of -G.
double bd_gap_exact(const BirthDeathChain& chain);

/// Full spectrum of -G, ascending.
Eigen::VectorXd bd_spectrum(const BirthDeathChain& chain);

}  // namespace fvlab

#endif  // FVLAB_TWO_POINT_HPP

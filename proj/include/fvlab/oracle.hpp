#ifndef FVLAB_ORACLE_HPP
#define FVLAB_ORACLE_HPP

#include <functional>
#include <map>
#include <vector>

#include "fvlab/model.hpp"

// Brute-force linear algebra on enumerable state spaces. Everything here is
// dense and guarded by explicit size limits.

namespace fvlab {

inline constexpr long kMaxEnumeration = 1'000'000;
inline constexpr long kMaxDenseGenerator = 5'000;
inline constexpr long kMaxSpectrumSize = 3'000;

/// Binomial coefficient as a double (exact for the sizes used here).
double binomial(long n, long k);

struct EnumeratedSpace {
  int K = 0;
  int N = 0;
  std::vector<Configuration> configs;
  std::map<Configuration, int> index;

  int size() const { return static_cast<int>(configs.size()); }
  int find(const Configuration& eta) const;
};

/// All configurations of N particles on K sites, lexicographically with the
/// first site descending: (N,0,...,0) first, (0,...,0,N) last.
EnumeratedSpace enumerate_configurations(int K, int N);

/// Dense generator of the particle system on E (rows sum to zero).
Eigen::MatrixXd generator_matrix(const Model& model, int N, const EnumeratedSpace& space);
Eigen::MatrixXd generator_matrix(const Model& model, int N);

/// Dense generator of the two-copy coupling on E x E; pair (a, b) has
/// index a * |E| + b.
Eigen::MatrixXd coupled_generator_matrix(const Model& model, int N, const EnumeratedSpace& space);

/// Normalized left null vector of a generator (pi L = 0, sum pi = 1).
Eigen::VectorXd stationary_exact(const Eigen::MatrixXd& generator);
Eigen::VectorXd stationary_exact(const Model& model, int N);

/// Left action v e^{tA} by uniformization; A must have nonnegative
/// off-diagonal entries and nonpositive row sums.
Eigen::RowVectorXd evolve_distribution(const Eigen::MatrixXd& A, const Eigen::RowVectorXd& v, double t);

/// Right action e^{tA} f by uniformization.
Eigen::VectorXd apply_semigroup(const Eigen::MatrixXd& A, const Eigen::VectorXd& f, double t);

/// cov(eta_t(k), eta_t(l)) started from the deterministic configuration eta0.
double transient_covariance(const Model& model, int N, const Configuration& eta0, int k, int l,
                            double t);

/// Sorted real parts of the eigenvalues of a dense matrix.
Eigen::VectorXd spectrum(const Eigen::MatrixXd& A);

/// Sorted eigenvalues of a generator reversible with respect to pi, via the
/// symmetrization D^{1/2} A D^{-1/2}. Tridiagonal input takes the O(n^2) path.
Eigen::VectorXd reversible_spectrum(const Eigen::MatrixXd& A, const Eigen::VectorXd& pi);

/// Gamma f(eta) = sum over moves of rate * (f(T eta) - f(eta))^2.
double carre_du_champ(const Model& model, int N, const std::function<double(const Configuration&)>& f,
                      const Configuration& eta);

/// Gamma f = L(f^2) - 2 f L f evaluated from a dense generator.
Eigen::VectorXd carre_du_champ_from_generator(const Eigen::MatrixXd& generator, const Eigen::VectorXd& f);

}  // namespace fvlab

#endif  // FVLAB_ORACLE_HPP

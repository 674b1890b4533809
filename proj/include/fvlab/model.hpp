#ifndef FVLAB_MODEL_HPP
#define FVLAB_MODEL_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fvlab {

/// Raised when a model, configuration or argument violates a stated invariant.
class InvalidModel : public std::invalid_argument {
 public:
  explicit InvalidModel(const std::string& what) : std::invalid_argument(what) {}
};

/// Killed continuous-time chain on the live states {0..K-1}.
///
/// `Q` holds the off-diagonal jump rates (the diagonal is always zero after
/// validation) and `p0` the killing rates towards the implicit cemetery.
struct Model {
  int K = 0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd p0;

  double rate(int i, int j) const { return i == j ? 0.0 : Q(i, j); }
  /// Sum of the off-diagonal entries of row i.
  double out_rate(int i) const { return Q.row(i).sum(); }
};

/// Occupation numbers of the N particles over the K live states.
using Configuration = std::vector<int>;

struct ErgodicCoefficients {
  double lambda = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double rho_prime = 0.0;
  // The lambda and rho' infima run over ordered pairs with i != i'.
  static constexpr const char* kPairConvention = "i != i'";
};

/// Checks every model invariant, zeroes the diagonal of Q and returns the
/// cleaned model. Throws InvalidModel naming the violated invariant.
Model validate_model(Model model);

Model make_model(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p0);

ErgodicCoefficients ergodic_coefficients(const Model& model);

int particle_count(const Configuration& eta);
void check_configuration(const Configuration& eta, int K, int N);

/// Half the L1 distance between occupation vectors.
double d1_distance(const Configuration& x, const Configuration& y);

/// Total variation distance between two probability vectors.
double total_variation(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu);

/// Empirical measure eta / N.
Eigen::VectorXd empirical_measure(const Configuration& eta);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

}  // namespace fvlab

#endif  // FVLAB_MODEL_HPP

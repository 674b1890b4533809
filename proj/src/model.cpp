#include "fvlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fvlab {

namespace {

bool strongly_connected(const Eigen::MatrixXd& Q) {
  const int K = static_cast<int>(Q.rows());
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(K, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < K; ++v) {
        double r = transpose ? Q(v, u) : Q(u, v);
        if (v != u && r > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

Model validate_model(Model model) {
  if (model.K < 2) throw InvalidModel("invalid model: K < 2");
  if (model.Q.rows() != model.K || model.Q.cols() != model.K)
    throw InvalidModel("invalid model: Q must be K x K");
  if (model.p0.size() != model.K) throw InvalidModel("invalid model: p0 must have length K");
  for (int i = 0; i < model.K; ++i) {
    model.Q(i, i) = 0.0;
    for (int j = 0; j < model.K; ++j) {
      if (!std::isfinite(model.Q(i, j)) || model.Q(i, j) < 0.0)
        throw InvalidModel("invalid model: negative rate in Q");
    }
    if (!std::isfinite(model.p0(i)) || model.p0(i) < 0.0)
      throw InvalidModel("invalid model: negative rate in p0");
  }
  if (model.p0.maxCoeff() <= 0.0) throw InvalidModel("invalid model: p0 identically zero");
  if (!strongly_connected(model.Q)) throw InvalidModel("invalid model: reducible Q");
  return model;
}

Model make_model(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p0) {
  Model m;
  m.K = static_cast<int>(Q.rows());
  m.Q = Q;
  m.p0 = p0;
  return validate_model(std::move(m));
}

ErgodicCoefficients ergodic_coefficients(const Model& model) {
  const int K = model.K;
  const auto& Q = model.Q;
  ErgodicCoefficients c;
  c.lambda = std::numeric_limits<double>::infinity();
  double joint = std::numeric_limits<double>::infinity();
  for (int i = 0; i < K; ++i) {
    for (int ip = 0; ip < K; ++ip) {
      if (i == ip) continue;
      double s = Q(i, ip) + Q(ip, i);
      for (int j = 0; j < K; ++j) {
        if (j != i && j != ip) s += std::min(Q(i, j), Q(ip, j));
      }
      c.lambda = std::min(c.lambda, s);
      joint = std::min(joint, s + std::min(model.p0(i), model.p0(ip)));
    }
  }
  c.alpha = 0.0;
  for (int j = 0; j < K; ++j) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
      if (i != j) m = std::min(m, Q(i, j));
    }
    c.alpha += m;
  }
  const double p_sup = model.p0.maxCoeff();
  c.rho = c.lambda - (p_sup - model.p0.minCoeff());
  c.rho_prime = joint - p_sup;
  return c;
}

int particle_count(const Configuration& eta) {
  return std::accumulate(eta.begin(), eta.end(), 0);
}

void check_configuration(const Configuration& eta, int K, int N) {
  if (static_cast<int>(eta.size()) != K)
    throw InvalidModel("configuration has " + std::to_string(eta.size()) + " sites, expected " +
                       std::to_string(K));
  for (int v : eta) {
    if (v < 0) throw InvalidModel("configuration has a negative occupation number");
  }
  if (particle_count(eta) != N)
    throw InvalidModel("configuration holds " + std::to_string(particle_count(eta)) +
                       " particles, expected " + std::to_string(N));
}

double d1_distance(const Configuration& x, const Configuration& y) {
  if (x.size() != y.size()) throw InvalidModel("d1_distance: mismatched K");
  if (particle_count(x) != particle_count(y)) throw InvalidModel("d1_distance: mismatched N");
  long s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - y[k]);
  return static_cast<double>(s) / 2.0;
}

double total_variation(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  if (mu.size() != nu.size()) throw InvalidModel("total_variation: length mismatch");
  constexpr double tol = 1e-12;
  if (std::abs(mu.sum() - 1.0) > tol || std::abs(nu.sum() - 1.0) > tol)
    throw InvalidModel("total_variation: input not normalized");
  return 0.5 * (mu - nu).cwiseAbs().sum();
}

Eigen::VectorXd empirical_measure(const Configuration& eta) {
  const double N = particle_count(eta);
  Eigen::VectorXd m(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) m(k) = eta[k] / N;
  return m;
}

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json j;
  j["K"] = model.K;
  nlohmann::json q = nlohmann::json::array();
  for (int i = 0; i < model.K; ++i) {
    std::vector<double> row(model.K);
    for (int k = 0; k < model.K; ++k) row[k] = model.Q(i, k);
    q.push_back(row);
  }
  j["Q"] = q;
  j["p0"] = std::vector<double>(model.p0.data(), model.p0.data() + model.K);
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  Model m;
  try {
    m.K = j.at("K").get<int>();
    auto rows = j.at("Q").get<std::vector<std::vector<double>>>();
    auto p0 = j.at("p0").get<std::vector<double>>();
    if (m.K < 2) throw InvalidModel("invalid model: K < 2");
    if (static_cast<int>(rows.size()) != m.K || static_cast<int>(p0.size()) != m.K)
      throw InvalidModel("invalid model: Q and p0 must have K rows/entries");
    m.Q = Eigen::MatrixXd::Zero(m.K, m.K);
    m.p0 = Eigen::VectorXd(m.K);
    for (int i = 0; i < m.K; ++i) {
      if (static_cast<int>(rows[i].size()) != m.K) throw InvalidModel("invalid model: Q must be K x K");
      for (int k = 0; k < m.K; ++k) m.Q(i, k) = rows[i][k];
      m.p0(i) = p0[i];
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidModel(std::string("invalid model JSON: ") + e.what());
  }
  return validate_model(std::move(m));
}

}  // namespace fvlab

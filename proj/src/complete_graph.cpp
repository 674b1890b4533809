#include "fvlab/complete_graph.hpp"

#include <algorithm>
#include <cmath>

namespace fvlab {

void check_params(const CompleteGraphParams& params) {
  if (params.K < 2) throw InvalidModel("complete graph requires K >= 2");
  if (params.N < 2) throw InvalidModel("complete graph requires N >= 2");
  if (!(params.p > 0.0)) throw InvalidModel("complete graph requires p > 0");
}

Model cg_model(int K, double p) {
  check_params({K, 2, p});
  Eigen::MatrixXd Q = Eigen::MatrixXd::Constant(K, K, 1.0 / K);
  return make_model(Q, Eigen::VectorXd::Constant(K, p));
}

namespace {

double log_weight(const CompleteGraphParams& params, const Configuration& eta) {
  double s = 0.0;
  for (int n : eta)
    for (int j = 0; j < n; ++j) s += std::log((params.N - 1 + params.K * params.p * j) / (j + 1.0));
  return s;
}

}  // namespace

double cg_invariant_weight(const CompleteGraphParams& params, const Configuration& eta) {
  return std::exp(log_weight(params, eta));
}

Eigen::VectorXd cg_invariant(const CompleteGraphParams& params) {
  check_params(params);
  const auto space = enumerate_configurations(params.K, params.N);
  Eigen::VectorXd logw(space.size());
  for (int a = 0; a < space.size(); ++a) logw(a) = log_weight(params, space.configs[a]);
  const double top = logw.maxCoeff();
  Eigen::VectorXd w = (logw.array() - top).exp();
  return w / w.sum();
}

double cg_normalizer_uniform_killing(int K, int N) {
  return binomial(long(K + 1) * N - K - 1, long(K) * N - K - 1);
}

double cg_marginal_law(int K, int N, int x) {
  if (K < 2 || N < 2) throw InvalidModel("cg_marginal_law requires K >= 2 and N >= 2");
  if (x < 0 || x > N) return 0.0;
  return binomial(N - 2 + x, N - 2) * binomial(long(K) * N - K - x, long(K - 1) * N - K) /
         cg_normalizer_uniform_killing(K, N);
}

StationaryMoments cg_stationary_moments(const CompleteGraphParams& params) {
  check_params(params);
  const double K = params.K, N = params.N, p = params.p;
  StationaryMoments m;
  m.variance = N * (K - 1) * (N * p + N - 1) / (K * K * (N - 1 + p));
  m.covariance = (-N * N * (p + 1) + N) / (K * K * (N - 1 + p));
  m.chaos_bound = std::sqrt(K * (p + 1) / N);
  return m;
}

double cg_dynamic_covariance(const CompleteGraphParams& params, const Configuration& eta0, double t,
                             int k, int l) {
  check_params(params);
  check_configuration(eta0, params.K, params.N);
  if (k == l) throw InvalidModel("cg_dynamic_covariance requires k != l");
  const double K = params.K, N = params.N, p = params.p;
  const double mean_inf = N / K;
  // E eta_t(k) = N/K + (eta0(k) - N/K) e^{-t}
  // d/dt E[eta(k) eta(l)] = -c E[eta(k) eta(l)] + s (E eta(k) + E eta(l))
  const double c = 2.0 * (N - 1 + p) / (N - 1);
  const double s = (N - 1) / K;
  const double e1 = std::exp(-t), ec = std::exp(-c * t);
  const double mk = mean_inf + (eta0[k] - mean_inf) * e1;
  const double ml = mean_inf + (eta0[l] - mean_inf) * e1;
  const double excess = eta0[k] + eta0[l] - 2.0 * mean_inf;
  const double product = double(eta0[k]) * eta0[l] * ec + s * (2.0 * mean_inf * (1.0 - ec) / c +
                                                               excess * (e1 - ec) / (c - 1.0));
  return product - mk * ml;
}

double cg_printed_dynamic_covariance(const CompleteGraphParams& params, const Configuration& eta0,
                                     double t, int k, int l) {
  check_params(params);
  check_configuration(eta0, params.K, params.N);
  const double K = params.K, N = params.N, p = params.p;
  const double ek = eta0[k], el = eta0[l];
  return ek * el * std::exp(-2.0 * K * (N - 1 + p) / (K * (N - 1)) * t) +
         (-N + 1 + 2 * p * N) / (K * (N - 1 + 2 * p)) * (ek + el) * std::exp(-t) -
         ek * el * std::exp(-2.0 * t) + (-N * N * (p + 1) + N) / (K * K * (N - 1 + p));
}

double cg_level(const CompleteGraphParams& params, int l) {
  return l + l * (l - 1.0) * params.p / (params.N - 1);
}

namespace {

void level_sums(const std::vector<double>& levels, int sites_left, int budget, double partial,
                std::vector<double>& out) {
  if (sites_left == 0) {
    out.push_back(partial);
    return;
  }
  for (int l = 0; l <= budget; ++l) level_sums(levels, sites_left - 1, budget - l, partial + levels[l], out);
}

}  // namespace

std::vector<double> cg_spectrum(const CompleteGraphParams& params) {
  check_params(params);
  if (binomial(params.N + params.K, params.K) > double(kMaxEnumeration))
    throw InvalidModel("cg_spectrum: combinatorial guard exceeded");
  std::vector<double> levels(params.N + 1);
  for (int l = 0; l <= params.N; ++l) levels[l] = cg_level(params, l);
  std::vector<double> out;
  level_sums(levels, params.K, params.N, 0.0, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }),
            out.end());
  return out;
}

SpectrumInclusion cg_spectrum_inclusion(const CompleteGraphParams& params) {
  const Model model = cg_model(params.K, params.p);
  const Eigen::MatrixXd L = generator_matrix(model, params.N);
  SpectrumInclusion out;
  out.exact = -reversible_spectrum(L, cg_invariant(params));
  std::sort(out.exact.data(), out.exact.data() + out.exact.size());
  const auto candidates = cg_spectrum(params);
  out.smallest_positive = std::numeric_limits<double>::infinity();
  for (double ev : out.exact) {
    auto it = std::lower_bound(candidates.begin(), candidates.end(), ev);
    double dist = std::numeric_limits<double>::infinity();
    if (it != candidates.end()) dist = std::min(dist, std::abs(*it - ev));
    if (it != candidates.begin()) dist = std::min(dist, std::abs(*(it - 1) - ev));
    out.max_distance = std::max(out.max_distance, dist);
    if (ev > 1e-8) out.smallest_positive = std::min(out.smallest_positive, ev);
  }
  return out;
}

}  // namespace fvlab

#include "fvlab/coupling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include "fvlab/oracle.hpp"
#include "fvlab/parallel.hpp"

namespace fvlab {

std::vector<CoupledMove> coupled_rates(const Model& model, int N, const CoupledPair& pair) {
  const int K = model.K;
  const auto& eta = pair.eta;
  const auto& etp = pair.eta_prime;
  const double denom = N - 1;

  std::vector<int> both(K), excess(K), excess_p(K);
  int d1 = 0;
  for (int k = 0; k < K; ++k) {
    both[k] = std::min(eta[k], etp[k]);
    excess[k] = std::max(eta[k] - etp[k], 0);
    excess_p[k] = std::max(etp[k] - eta[k], 0);
    d1 += excess[k];
  }

  std::map<std::array<int, 4>, double> acc;
  auto add = [&](int i, int ip, int j, int jp, double rate) {
    if (rate <= 0.0 || (i == j && ip == jp)) return;
    acc[{i, ip, j, jp}] += rate;
  };
  // Unmatched particles land on the excess sites of their own copy; the
  // joint law of the two landing sites is the product of the normalized
  // excesses, scaled by d1 / (N - 1).
  auto split_landing = [&](int i, int ip, double rate) {
    if (d1 == 0) return;
    for (int j = 0; j < K; ++j) {
      if (excess[j] == 0) continue;
      for (int jp = 0; jp < K; ++jp) {
        if (excess_p[jp] == 0) continue;
        add(i, ip, j, jp, rate * excess[j] * excess_p[jp] / (denom * d1));
      }
    }
  };

  // Couples sharing site i.
  for (int i = 0; i < K; ++i) {
    if (both[i] == 0) continue;
    for (int j = 0; j < K; ++j) {
      if (j == i) continue;
      add(i, i, j, j, both[i] * model.Q(i, j));
      add(i, i, j, j, model.p0(i) * both[i] * both[j] / denom);
    }
    split_landing(i, i, model.p0(i) * both[i]);
  }

  // Unmatched particle of the first copy at i paired with one of the
  // second copy at i'.
  for (int i = 0; i < K; ++i) {
    if (excess[i] == 0) continue;
    for (int ip = 0; ip < K; ++ip) {
      if (excess_p[ip] == 0) continue;
      const double w = double(excess[i]) * excess_p[ip] / d1;
      const double pi = model.p0(i), pip = model.p0(ip);
      for (int j = 0; j < K; ++j) {
        if (j == i || j == ip) continue;
        add(i, ip, j, j, w * std::min(model.Q(i, j), model.Q(ip, j)));
        add(i, ip, j, ip, w * std::max(model.Q(i, j) - model.Q(ip, j), 0.0));
        add(i, ip, i, j, w * std::max(model.Q(ip, j) - model.Q(i, j), 0.0));
      }
      add(i, ip, ip, ip, w * model.Q(i, ip));
      add(i, ip, i, i, w * model.Q(ip, i));

      const double joint = std::min(pi, pip);
      for (int j = 0; j < K; ++j) add(i, ip, j, j, w * joint * both[j] / denom);
      split_landing(i, ip, w * joint);
      for (int j = 0; j < K; ++j) {
        add(i, ip, j, ip, w * std::max(pi - pip, 0.0) * eta[j] / denom);
        add(i, ip, i, j, w * std::max(pip - pi, 0.0) * etp[j] / denom);
      }
    }
  }

  std::vector<CoupledMove> out;
  out.reserve(acc.size());
  for (const auto& [key, rate] : acc) out.push_back({key[0], key[1], key[2], key[3], rate});
  return out;
}

CoupledProcess::CoupledProcess(const Model& model, int N, CoupledPair pair0, std::uint64_t seed)
    : model_(&model), N_(N), pair_(std::move(pair0)), rng_(seed) {
  if (N < 2) throw InvalidModel("simulation requires N >= 2");
  check_configuration(pair_.eta, model.K, N);
  check_configuration(pair_.eta_prime, model.K, N);
  schedule();
}

void CoupledProcess::schedule() {
  moves_ = coupled_rates(*model_, N_, pair_);
  total_ = 0.0;
  for (const auto& mv : moves_) total_ += mv.rate;
  next_event_ = total_ > 0.0 ? time_ + rng_.exponential(total_) : std::numeric_limits<double>::infinity();
}

void CoupledProcess::advance_to(double t) {
  while (next_event_ <= t) {
    time_ = next_event_;
    double u = rng_.uniform() * total_;
    const CoupledMove* chosen = &moves_.back();
    for (const auto& mv : moves_) {
      if (u <= mv.rate) {
        chosen = &mv;
        break;
      }
      u -= mv.rate;
    }
    --pair_.eta[chosen->i];
    ++pair_.eta[chosen->j];
    --pair_.eta_prime[chosen->ip];
    ++pair_.eta_prime[chosen->jp];
    schedule();
  }
  time_ = std::max(time_, t);
}

CoupledPair simulate_pair(const Model& model, int N, const CoupledPair& pair0, double t_end,
                          std::uint64_t seed) {
  if (!(t_end >= 0.0)) throw InvalidModel("simulate_pair requires t_end >= 0");
  CoupledProcess process(model, N, pair0, seed);
  process.advance_to(t_end);
  return process.state();
}

DecayCurve wasserstein_decay(const Model& model, int N, const CoupledPair& pair0,
                             const std::vector<double>& times, int replicas, std::uint64_t seed) {
  if (replicas < 1) throw InvalidModel("wasserstein_decay requires replicas >= 1");
  check_time_grid(times, times.empty() ? 0.0 : times.back());
  const int T = static_cast<int>(times.size());
  std::vector<std::vector<double>> samples(replicas, std::vector<double>(T));
  parallel_for(replicas, [&](int r) {
    CoupledProcess process(model, N, pair0, replica_seed(seed, r));
    for (int t = 0; t < T; ++t) {
      process.advance_to(times[t]);
      samples[r][t] = process.distance();
    }
  });
  DecayCurve curve;
  curve.times = times;
  for (int t = 0; t < T; ++t) {
    double mean = 0.0;
    for (int r = 0; r < replicas; ++r) mean += samples[r][t];
    mean /= replicas;
    double ss = 0.0;
    for (int r = 0; r < replicas; ++r) ss += (samples[r][t] - mean) * (samples[r][t] - mean);
    const double se = replicas > 1 ? std::sqrt(ss / (replicas - 1) / replicas) : 0.0;
    curve.estimate.push_back(mean);
    curve.std_error.push_back(se);
  }
  return curve;
}

void write_decay_csv(const DecayCurve& curve, std::ostream& out) {
  out << "time,estimate,std_error\n" << std::setprecision(17);
  for (std::size_t t = 0; t < curve.times.size(); ++t)
    out << curve.times[t] << ',' << curve.estimate[t] << ',' << curve.std_error[t] << '\n';
}

ConsistencyReport coupling_consistency_check(const Model& model, int N) {
  const auto space = enumerate_configurations(model.K, N);
  const long n = space.size();
  if (n * n > kMaxCoupledPairs) throw InvalidModel("coupling_consistency_check: |E|^2 exceeds the guard");
  const auto coeffs = ergodic_coefficients(model);
  const int K = model.K;

  ConsistencyReport report;
  report.rho = coeffs.rho;
  report.rho_prime = coeffs.rho_prime;
  report.max_drift_violation = -std::numeric_limits<double>::infinity();
  report.max_drift_violation_prime = -std::numeric_limits<double>::infinity();

  // Single-copy rate of i -> j out of each configuration.
  std::vector<Eigen::MatrixXd> single(n, Eigen::MatrixXd::Zero(K, K));
  for (long a = 0; a < n; ++a)
    for (const auto& mv : transition_rates(model, N, space.configs[a])) single[a](mv.from, mv.to) = mv.rate;

  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) {
      const CoupledPair pair{space.configs[a], space.configs[b]};
      Eigen::MatrixXd first = Eigen::MatrixXd::Zero(K, K);
      Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K, K);
      const double d0 = d1_distance(pair.eta, pair.eta_prime);
      double drift = 0.0;
      for (const auto& mv : coupled_rates(model, N, pair)) {
        if (mv.i != mv.j) first(mv.i, mv.j) += mv.rate;
        if (mv.ip != mv.jp) second(mv.ip, mv.jp) += mv.rate;
        Configuration x = pair.eta, y = pair.eta_prime;
        --x[mv.i];
        ++x[mv.j];
        --y[mv.ip];
        ++y[mv.jp];
        drift += mv.rate * (d1_distance(x, y) - d0);
      }
      // Indicator functions of single target configurations reduce the
      // marginal identity to agreement of the aggregated move rates.
      report.max_marginal_gap = std::max(
          {report.max_marginal_gap, (first - single[a]).cwiseAbs().maxCoeff(),
           (second - single[b]).cwiseAbs().maxCoeff()});
      report.max_drift_violation = std::max(report.max_drift_violation, drift + coeffs.rho * d0);
      report.max_drift_violation_prime =
          std::max(report.max_drift_violation_prime, drift + coeffs.rho_prime * d0);
      ++report.pairs;
    }
  }
  return report;
}

nlohmann::json to_json(const ConsistencyReport& report) {
  return {{"max_marginal_gap", report.max_marginal_gap},
          {"max_drift_violation", report.max_drift_violation},
          {"max_drift_violation_rho_prime", report.max_drift_violation_prime},
          {"rho", report.rho},
          {"rho_prime", report.rho_prime},
          {"pairs", report.pairs}};
}

}  // namespace fvlab

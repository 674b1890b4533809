#include "fvlab/simulator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fvlab/parallel.hpp"

namespace fvlab {

std::vector<Move> transition_rates(const Model& model, int N, const Configuration& eta) {
  std::vector<Move> moves;
  const double denom = N - 1;
  for (int i = 0; i < model.K; ++i) {
    if (eta[i] == 0) continue;
    for (int j = 0; j < model.K; ++j) {
      if (j == i) continue;
      double r = eta[i] * (model.Q(i, j) + model.p0(i) * eta[j] / denom);
      if (r > 0.0) moves.push_back({i, j, r});
    }
  }
  return moves;
}

double total_rate(const Model& model, int N, const Configuration& eta) {
  double s = 0.0;
  for (int i = 0; i < model.K; ++i)
    s += eta[i] * (model.out_rate(i) + model.p0(i) * (N - eta[i]) / double(N - 1));
  return s;
}

FvProcess::FvProcess(const Model& model, int N, Configuration eta0, std::uint64_t seed)
    : model_(&model), N_(N), eta_(std::move(eta0)), rng_(seed), row_rate_(model.K, 0.0) {
  if (N < 2) throw InvalidModel("simulation requires N >= 2");
  check_configuration(eta_, model.K, N);
  for (int i = 0; i < model.K; ++i) refresh_row(i);
  schedule();
}

void FvProcess::refresh_row(int i) {
  row_rate_[i] = eta_[i] * (model_->out_rate(i) + model_->p0(i) * (N_ - eta_[i]) / double(N_ - 1));
}

void FvProcess::schedule() {
  double total = 0.0;
  for (double r : row_rate_) total += r;
  next_event_ = total > 0.0 ? time_ + rng_.exponential(total) : std::numeric_limits<double>::infinity();
}

Move FvProcess::fire() {
  const int K = model_->K;
  double total = 0.0;
  for (double r : row_rate_) total += r;
  double u = rng_.uniform() * total;
  int i = -1;
  for (int r = 0; r < K; ++r) {
    if (row_rate_[r] <= 0.0) continue;
    i = r;
    if (u <= row_rate_[r]) break;
    u -= row_rate_[r];
  }

  const double denom = N_ - 1;
  double row = 0.0;
  for (int j = 0; j < K; ++j) {
    if (j != i) row += model_->Q(i, j) + model_->p0(i) * eta_[j] / denom;
  }
  double v = rng_.uniform() * row;
  int target = -1;
  for (int j = 0; j < K; ++j) {
    if (j == i) continue;
    double w = model_->Q(i, j) + model_->p0(i) * eta_[j] / denom;
    if (w <= 0.0) continue;
    target = j;
    if (v <= w) break;
    v -= w;
  }
  --eta_[i];
  ++eta_[target];
  refresh_row(i);
  refresh_row(target);
  ++events_;
  return {i, target, 0.0};
}

std::optional<Move> FvProcess::step() {
  if (!std::isfinite(next_event_)) return std::nullopt;
  time_ = next_event_;
  const Move m = fire();
  schedule();
  return m;
}

void FvProcess::advance_to(double t) {
  while (next_event_ <= t) {
    time_ = next_event_;
    fire();
    schedule();
  }
  time_ = std::max(time_, t);
}

void check_spec(const SimulationSpec& spec) {
  if (spec.N < 2) throw InvalidModel("simulation requires N >= 2");
  if (!(spec.t_end >= 0.0)) throw InvalidModel("simulation requires t_end >= 0");
  if (spec.replicas < 1) throw InvalidModel("simulation requires replicas >= 1");
}

Configuration simulate(const SimulationSpec& spec, const Configuration& eta0) {
  check_spec(spec);
  FvProcess process(spec.model, spec.N, eta0, spec.seed);
  process.advance_to(spec.t_end);
  return process.state();
}

std::vector<Configuration> simulate_replicas(const SimulationSpec& spec, const Configuration& eta0) {
  check_spec(spec);
  check_configuration(eta0, spec.model.K, spec.N);
  std::vector<Configuration> out(spec.replicas);
  parallel_for(spec.replicas, [&](int r) {
    FvProcess process(spec.model, spec.N, eta0, replica_seed(spec.seed, r));
    process.advance_to(spec.t_end);
    out[r] = process.state();
  });
  return out;
}

void check_time_grid(const std::vector<double>& times, double t_end) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || times[k] > t_end) throw InvalidModel("time grid must lie in [0, t_end]");
    if (k > 0 && times[k] < times[k - 1]) throw InvalidModel("time grid must be sorted");
  }
}

EnsembleStatistics ensemble_statistics(const SimulationSpec& spec, const Configuration& eta0,
                                       const std::vector<double>& times) {
  check_spec(spec);
  check_configuration(eta0, spec.model.K, spec.N);
  check_time_grid(times, spec.t_end);
  if (spec.replicas < 2) throw InvalidModel("ensemble statistics need at least 2 replicas");

  const int K = spec.model.K;
  const int T = static_cast<int>(times.size());
  const int R = spec.replicas;
  // samples[r][t * K + k]
  std::vector<std::vector<int>> samples(R);
  parallel_for(R, [&](int r) {
    FvProcess process(spec.model, spec.N, eta0, replica_seed(spec.seed, r));
    auto& row = samples[r];
    row.resize(static_cast<std::size_t>(T) * K);
    for (int t = 0; t < T; ++t) {
      process.advance_to(times[t]);
      for (int k = 0; k < K; ++k) row[t * K + k] = process.state()[k];
    }
  });

  EnsembleStatistics stats;
  stats.times = times;
  stats.replicas = R;
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(K);
    for (int r = 0; r < R; ++r)
      for (int k = 0; k < K; ++k) mean(k) += samples[r][t * K + k];
    mean /= R;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd cov_sq = Eigen::MatrixXd::Zero(K, K);
    for (int r = 0; r < R; ++r) {
      Eigen::VectorXd x(K);
      for (int k = 0; k < K; ++k) x(k) = samples[r][t * K + k] - mean(k);
      Eigen::MatrixXd prod = x * x.transpose();
      cov += prod;
      cov_sq += prod.cwiseProduct(prod);
    }
    // Standard error of the covariance estimate from the spread of the
    // centred products.
    Eigen::MatrixXd prod_mean = cov / R;
    Eigen::MatrixXd prod_var = (cov_sq / R - prod_mean.cwiseProduct(prod_mean)) * (double(R) / (R - 1));
    cov /= (R - 1);
    stats.mean_occupation.push_back(mean);
    stats.mean_se.push_back((cov.diagonal() / R).cwiseSqrt());
    stats.covariance.push_back(cov);
    stats.covariance_se.push_back((prod_var.cwiseMax(0.0) / R).cwiseSqrt());
  }
  return stats;
}

void write_ensemble_csv(const EnsembleStatistics& stats, std::ostream& out) {
  out << "time,k,mean,var,se\n" << std::setprecision(17);
  for (std::size_t t = 0; t < stats.times.size(); ++t) {
    for (int k = 0; k < stats.mean_occupation[t].size(); ++k) {
      out << stats.times[t] << ',' << k + 1 << ',' << stats.mean_occupation[t](k) << ','
          << stats.covariance[t](k, k) << ',' << stats.mean_se[t](k) << '\n';
    }
  }
}

void write_covariance_csv(const EnsembleStatistics& stats, std::ostream& out) {
  out << "time,k,l,cov,se\n" << std::setprecision(17);
  for (std::size_t t = 0; t < stats.times.size(); ++t) {
    const auto& c = stats.covariance[t];
    for (int k = 0; k < c.rows(); ++k) {
      for (int l = k; l < c.cols(); ++l) {
        out << stats.times[t] << ',' << k + 1 << ',' << l + 1 << ',' << c(k, l) << ','
            << stats.covariance_se[t](k, l) << '\n';
      }
    }
  }
}

}  // namespace fvlab

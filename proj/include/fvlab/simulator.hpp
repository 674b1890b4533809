#ifndef FVLAB_SIMULATOR_HPP
#define FVLAB_SIMULATOR_HPP

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "fvlab/model.hpp"

namespace fvlab {

/// 64-bit Mersenne twister with platform-independent uniform and
/// exponential draws (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

/// One particle leaving site `from` for site `to`.
struct Move {
  int from = 0;
  int to = 0;
  double rate = 0.0;
};

/// All positive-rate moves T_{i->j} out of eta, with rate
/// eta(i) * (Q(i,j) + p0(i) * eta(j) / (N - 1)).
std::vector<Move> transition_rates(const Model& model, int N, const Configuration& eta);

/// Sum of all rates in transition_rates().
double total_rate(const Model& model, int N, const Configuration& eta);

/// Single Fleming-Viot trajectory driven by competing exponential clocks.
/// The total rate of row i depends only on eta(i), so a move i -> j only
/// refreshes rows i and j.
class FvProcess {
 public:
  FvProcess(const Model& model, int N, Configuration eta0, std::uint64_t seed);

  /// Runs every event with time <= t; the state is then the state at t.
  void advance_to(double t);

  /// Fires the next event; the returned move has rate 0. Empty when the
  /// total rate is zero.
  std::optional<Move> step();

  const Configuration& state() const { return eta_; }
  double time() const { return time_; }
  long events() const { return events_; }

 private:
  void refresh_row(int i);
  void schedule();
  Move fire();

  const Model* model_;
  int N_;
  Configuration eta_;
  Rng rng_;
  std::vector<double> row_rate_;
  double time_ = 0.0;
  double next_event_ = 0.0;
  long events_ = 0;
};

struct SimulationSpec {
  Model model;
  int N = 2;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  int replicas = 1;
};

void check_spec(const SimulationSpec& spec);

/// Endpoint at spec.t_end of one exact trajectory seeded with spec.seed.
Configuration simulate(const SimulationSpec& spec, const Configuration& eta0);

/// Endpoints at spec.t_end of all replicas; replica r uses replica_seed(seed, r).
std::vector<Configuration> simulate_replicas(const SimulationSpec& spec, const Configuration& eta0);

struct EnsembleStatistics {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> mean_occupation;  // per time, length K
  std::vector<Eigen::VectorXd> mean_se;          // per time, length K
  std::vector<Eigen::MatrixXd> covariance;       // per time, K x K
  std::vector<Eigen::MatrixXd> covariance_se;    // per time, K x K
  int replicas = 0;
};

EnsembleStatistics ensemble_statistics(const SimulationSpec& spec, const Configuration& eta0,
                                       const std::vector<double>& times);

void check_time_grid(const std::vector<double>& times, double t_end);

/// Columns: time,k,mean,var,se (k is 1-based).
void write_ensemble_csv(const EnsembleStatistics& stats, std::ostream& out);
/// Long format: time,k,l,cov,se for k <= l.
void write_covariance_csv(const EnsembleStatistics& stats, std::ostream& out);

}  // namespace fvlab

#endif  // FVLAB_SIMULATOR_HPP

#ifndef FVLAB_COUPLING_HPP
#define FVLAB_COUPLING_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fvlab/model.hpp"
#include "fvlab/simulator.hpp"

namespace fvlab {

struct CoupledPair {
  Configuration eta;
  Configuration eta_prime;
};

/// Joint jump: the first copy moves i -> j and the second i' -> j'. A copy
/// with i == j (resp. i' == j') does not move.
struct CoupledMove {
  int i = 0;
  int ip = 0;
  int j = 0;
  int jp = 0;
  double rate = 0.0;
};

/// Rates of the two-copy coupling at (eta, eta'). Couples of particles
/// sharing a site jump together; each unmatched particle of the first copy
/// is paired with an unmatched particle of the second copy picked with
/// weight (eta'(i') - eta(i'))_+ / d1. Clauses whose weight is 0/0 (no
/// unmatched particles) are absent. Entries are merged per tuple and moves
/// where neither copy changes are dropped.
std::vector<CoupledMove> coupled_rates(const Model& model, int N, const CoupledPair& pair);

/// Exact trajectory of the coupled process.
class CoupledProcess {
 public:
  CoupledProcess(const Model& model, int N, CoupledPair pair0, std::uint64_t seed);

  void advance_to(double t);
  const CoupledPair& state() const { return pair_; }
  double distance() const { return d1_distance(pair_.eta, pair_.eta_prime); }

 private:
  void schedule();

  const Model* model_;
  int N_;
  CoupledPair pair_;
  Rng rng_;
  std::vector<CoupledMove> moves_;
  double total_ = 0.0;
  double time_ = 0.0;
  double next_event_ = 0.0;
};

CoupledPair simulate_pair(const Model& model, int N, const CoupledPair& pair0, double t_end,
                          std::uint64_t seed);

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> std_error;
};

/// Monte Carlo estimate of E[d1(eta_t, eta'_t)] under the coupling.
DecayCurve wasserstein_decay(const Model& model, int N, const CoupledPair& pair0,
                             const std::vector<double>& times, int replicas, std::uint64_t seed);

/// Columns: time,estimate,std_error.
void write_decay_csv(const DecayCurve& curve, std::ostream& out);

struct ConsistencyReport {
  double max_marginal_gap = 0.0;
  double max_drift_violation = 0.0;        // max of (LL d1 + rho d1)
  double max_drift_violation_prime = 0.0;  // same with rho'
  double rho = 0.0;
  double rho_prime = 0.0;
  long pairs = 0;
};

inline constexpr long kMaxCoupledPairs = 1'000'000;

/// Exhaustive check over E x E of the marginal identity (every copy's
/// aggregated jump rates equal the single-copy generator) and of the
/// drift inequality LL d1 <= -rho d1.
ConsistencyReport coupling_consistency_check(const Model& model, int N);

nlohmann::json to_json(const ConsistencyReport& report);

}  // namespace fvlab

#endif  // FVLAB_COUPLING_HPP

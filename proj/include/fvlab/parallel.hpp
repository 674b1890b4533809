#ifndef FVLAB_PARALLEL_HPP
#define FVLAB_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace fvlab {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replica `index` under master seed `seed`. Independent of the
/// order in which replicas are executed.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t index);

/// Worker count: FV_LAB_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(r) for r in [0, count) on up to worker_count() threads.
/// Callers write results into slot r and reduce in index order afterwards.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace fvlab

#endif  // FVLAB_PARALLEL_HPP

#ifndef CARNOT_PARALLEL_HPP
#define CARNOT_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace carnot {

/// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned requested);

/// Runs fn(i) for i in [0, n) on `workers` threads. Callers make results
/// scheduling-independent by writing to disjoint slots; exceptions are
/// collected and the first one rethrown after the pool joins.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) sum; deterministic for a fixed array regardless of how
/// the values were produced.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace carnot

#endif

#pragma once

#include <cstddef>
#include <functional>

namespace congrulab {

/// Worker count: CONGRULAB_THREADS if set to a positive integer, otherwise
/// the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace congrulab

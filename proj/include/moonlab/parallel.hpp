#pragma once

#include <cstddef>
#include <functional>

namespace moonlab {

/// requested > 0 wins; otherwise MOONLAB_THREADS (0 or unset = hardware concurrency).
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for every i in [0, count) on up to `threads` workers. Tasks are
/// claimed dynamically, so fn must only write state owned by index i.
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace moonlab

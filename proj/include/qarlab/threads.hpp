#ifndef QARLAB_THREADS_HPP
#define QARLAB_THREADS_HPP

#include <functional>

namespace qarlab {

// Resolves a requested thread count: 0 means "available parallelism",
// with the QARLAB_THREADS environment variable as fallback override.
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers. Tasks are
// handed out by index so callers can write results into preallocated
// slots and aggregate deterministically afterwards.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

} // namespace qarlab

#endif

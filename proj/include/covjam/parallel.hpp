#pragma once

#include <cstddef>
#include <functional>

namespace covjam {

/// Number of worker threads used by parallel_for (default: hardware concurrency).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, count). Indices are split into contiguous chunks;
/// nested calls from inside a worker run serially. Callers write results into
/// per-index slots and reduce afterwards in index order, so results never
/// depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace covjam

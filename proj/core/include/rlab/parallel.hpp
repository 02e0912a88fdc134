#pragma once

#include <cstddef>
#include <functional>

namespace rlab {

// Worker count: RLAB_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, count). Each index is visited exactly once; callers
// write results into per-index slots so reductions stay deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rlab

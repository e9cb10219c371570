#pragma once

#include <cstddef>
#include <functional>

namespace looplab {

// Worker count used by parallel_for. 0 selects std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; callers write
// results into slot i and reduce afterwards in index order, so the outcome does not
// depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace looplab

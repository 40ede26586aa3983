#pragma once

#include <cstddef>
#include <functional>

namespace spudd {

// Worker count used by every parallel loop in the library. Defaults to the
// SPUDD_THREADS environment variable when set, else hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [begin, end) on a pool of workers. Bodies
// must write only to slots owned by their index; results are then
// independent of the worker count.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace spudd

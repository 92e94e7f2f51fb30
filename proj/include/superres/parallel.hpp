#pragma once

#include <cstddef>
#include <functional>

namespace superres {

// Worker count: SUPERRES_THREADS if set to a positive integer, else the hardware concurrency.
unsigned thread_count();

// Calls body(i) for i in [0, n). Each index must only write its own output slot;
// results are then independent of scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace superres

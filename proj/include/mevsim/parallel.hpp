#pragma once

#include <cstddef>
#include <functional>

namespace mevsim {

/// Runs body(i) for i in [0, n) over disjoint index chunks. Each index owns
/// its output slot, so results are independent of thread count and
/// scheduling. Small n runs inline. The first exception thrown by any worker
/// is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mevsim

#pragma once

#include <cstddef>
#include <functional>

namespace emms {

// Process-wide worker count used by parallel_for. 1 means fully serial.
void set_thread_count(int n);
int thread_count();

// Static partition of [begin, end) across workers. The chunk assignment
// depends only on the range and worker count, and each index is touched by
// exactly one worker, so results are independent of scheduling order.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

} // namespace emms

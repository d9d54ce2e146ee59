#include "emms/util/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace emms {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n)
{
    g_threads.store(n < 1 ? 1 : n);
}

int thread_count()
{
    return g_threads.load();
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body)
{
    const std::size_t n = end > begin ? end - begin : 0;
    const int workers = thread_count();
    if (n == 0)
        return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = begin; i < end; ++i)
            body(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = begin + t; i < end; i += w)
                body(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace emms

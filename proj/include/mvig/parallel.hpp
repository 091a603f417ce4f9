#pragma once

// Deterministic fan-out of an index range over worker threads. Results must
// be written by index (callers pair this with Rng::stream(index)), so the
// output is identical for any job count.

#include <functional>
#include <thread>
#include <vector>

namespace mvig {

inline void parallel_for(std::size_t count, int jobs,
                         const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(jobs, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    for (std::thread& t : pool) t.join();
}

} // namespace mvig

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ammfg {

inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Run body(i) for i in [0, n) over contiguous chunks. Results must be written
/// to per-index slots; the caller reduces them in index order, which keeps
/// outputs independent of the worker count.
template<class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body)
{
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::size_t const chunks = std::min<std::size_t>(workers, n);
    std::exception_ptr failure;
    std::mutex failure_lock;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c)
    {
        std::size_t const lo = n * c / chunks;
        std::size_t const hi = n * (c + 1) / chunks;
        pool.emplace_back([&, lo, hi] {
            try
            {
                for (std::size_t i = lo; i < hi; ++i)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> guard(failure_lock);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace ammfg

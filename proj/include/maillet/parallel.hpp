#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace maillet {

// Worker count request. threads == 0 resolves from MAILLET_THREADS, then
// from the hardware.
struct Parallelism {
    unsigned threads = 0;
};

// Explicit request wins; otherwise min(hardware, MAILLET_THREADS) when the
// variable holds a positive integer.
unsigned resolve_threads(Parallelism par);

// Runs fn(chunk) for every chunk in [0, chunks). Chunk boundaries are chosen
// by the caller and must not depend on the worker count; results written per
// chunk and combined in ascending order are then identical for any thread
// count. The first exception thrown by a worker is rethrown here.
template <class Fn>
void for_each_chunk(std::size_t chunks, Parallelism par, Fn&& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(par), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) fn(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) return;
            try {
                fn(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace maillet

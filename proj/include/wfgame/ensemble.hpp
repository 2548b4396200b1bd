#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "wfgame/rng.hpp"

namespace wfgame {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs `count` independent replicas of `work(index, rng)` and returns the
// results ordered by replica index. Replica i always sees the stream
// derive_seed(root_seed, i), so the output does not depend on the number of
// threads.
template <typename Work>
auto run_ensemble(std::size_t count, std::uint64_t root_seed, Work&& work, int threads = 0)
    -> std::vector<decltype(work(std::size_t{0}, std::declval<Rng&>()))> {
    using Result = decltype(work(std::size_t{0}, std::declval<Rng&>()));
    std::vector<Result> results(count);
    const int nthreads = std::min<std::size_t>(resolve_threads(threads), count ? count : 1);
    std::exception_ptr failure = nullptr;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int tid = 0; tid < nthreads; ++tid) {
        pool.emplace_back([&, tid]() {
            try {
                for (std::size_t i = tid; i < count; i += nthreads) {
                    Rng rng(derive_seed(root_seed, i));
                    results[i] = work(i, rng);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

} // namespace wfgame

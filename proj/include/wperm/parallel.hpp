#pragma once

// Chunked Monte Carlo. Work is cut into fixed chunks, chunk i always uses
// RngStream(seed, stream_base + i), and results come back in chunk order, so
// output does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "wperm/rng.hpp"

namespace wperm {

inline constexpr const char* threads_env = "WPERM_THREADS";

// Explicit request wins, then the environment, then the hardware.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv(threads_env)) {
        try {
            int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline constexpr std::size_t default_chunk = 1000;

// fn(RngStream&, begin, end) -> R for each chunk [begin, end) of [0, total).
template <class Fn>
auto run_chunks(std::size_t total, std::uint64_t seed, std::uint64_t stream_base, unsigned threads, Fn fn,
                std::size_t chunk = default_chunk) {
    using R = decltype(fn(std::declval<RngStream&>(), std::size_t{}, std::size_t{}));
    const std::size_t n_chunks = (total + chunk - 1) / chunk;
    std::vector<R> results(n_chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            try {
                RngStream rng(seed, stream_base + i);
                const std::size_t begin = i * chunk;
                results[i] = fn(rng, begin, std::min(total, begin + chunk));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned t = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n_chunks, 1))));
    if (t == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace wperm

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cubature {

/// Splits [0, total) into fixed-size chunks, evaluates `fn(chunk, begin, end)`
/// on up to `workers` threads and returns the per-chunk results in chunk
/// order. Chunk boundaries depend only on `total` and `chunk_size`, so any
/// ordered reduction of the result is independent of the worker count.
template <class Fn>
auto run_chunks(std::size_t total, std::size_t chunk_size, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}))> {
    using Partial = decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}));
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
    std::vector<Partial> out(chunks);
    if (chunks == 0) return out;

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto body = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                const std::size_t begin = c * chunk_size;
                const std::size_t end = std::min(total, begin + chunk_size);
                out[c] = fn(c, begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };

    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace cubature

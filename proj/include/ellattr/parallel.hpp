#ifndef ELLATTR_PARALLEL_HPP
#define ELLATTR_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ellattr {

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// Chunk boundaries depend only on (n, chunk_size), never on the worker
/// count, so callers that write per-chunk results and reduce them in chunk
/// order get output independent of the number of threads.
inline void for_chunks(std::size_t n, std::size_t chunk_size, int threads,
                       const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = n;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;

    if (threads <= 0) threads = int(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    std::size_t workers = std::min<std::size_t>(std::size_t(threads), n_chunks);

    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ellattr

#endif

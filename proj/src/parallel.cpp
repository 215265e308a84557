#include "blockrip/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace blockrip {

std::size_t thread_budget() {
    const char* env = std::getenv("BLOCKRIP_THREADS");
    if (env != nullptr) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t num_chunks = (n + chunk_size - 1) / chunk_size;
    const std::size_t workers = std::min(thread_budget(), num_chunks);

    if (workers <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) {
            std::size_t begin = c * chunk_size;
            fn(c, begin, std::min(begin + chunk_size, n));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= num_chunks) return;
            std::size_t begin = c * chunk_size;
            fn(c, begin, std::min(begin + chunk_size, n));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
}

}  // namespace blockrip

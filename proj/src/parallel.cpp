#include "gs4d/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gs4d {

int default_threads() {
    if (const char* env = std::getenv("GS4D_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void for_each_block(std::size_t n_blocks, const std::function<void(std::size_t)>& fn, int threads) {
    if (threads <= 0) threads = default_threads();
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t b; (b = next.fetch_add(1)) < n_blocks;) {
            try {
                fn(b);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n_blocks;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace gs4d

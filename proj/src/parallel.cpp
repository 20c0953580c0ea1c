#include "nfcorr/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nfcorr {

std::size_t worker_count() {
    if (const char* env = std::getenv("NFCORR_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

void parallel_for(std::size_t num_blocks, const std::function<void(std::size_t)>& fn) {
    if (num_blocks == 0) return;
    const std::size_t workers = std::min(worker_count(), num_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < num_blocks; ++b) fn(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_block = num_blocks;
    std::exception_ptr err;

    auto work = [&]() {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= num_blocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (b < err_block) {
                    err_block = b;
                    err = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    if (err) std::rethrow_exception(err);
}

}  // namespace nfcorr

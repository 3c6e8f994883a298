#pragma once

// Blocked Monte Carlo driver.  Work is split into fixed-size blocks; block b
// always consumes substream(b) of the base stream and partial accumulators
// are merged in block order, so results are bit-identical for any worker
// count.  Bodies may keep per-block workspace.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "conewhit/random.hpp"

namespace conewhit {

inline constexpr long long kMcBlockSize = 16384;

// Body: void(RandomStream& rng, long long count, Acc& acc)
template <class Acc, class Body>
Acc mc_blocked(long long n, const RandomStream& base, int workers, Body&& body) {
    const long long nblocks = (n + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<Acc> partials(static_cast<std::size_t>(nblocks));

    auto run_block = [&](long long b) {
        RandomStream rng = base.substream(static_cast<std::uint64_t>(b));
        const long long lo = b * kMcBlockSize;
        const long long count = std::min(kMcBlockSize, n - lo);
        body(rng, count, partials[static_cast<std::size_t>(b)]);
    };

    if (workers <= 1 || nblocks <= 1) {
        for (long long b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<long long> next{0};
        std::exception_ptr first_error;
        std::mutex err_mutex;
        auto worker = [&] {
            for (;;) {
                const long long b = next.fetch_add(1);
                if (b >= nblocks) return;
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        const int nthreads = static_cast<int>(std::min<long long>(workers, nblocks));
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    Acc total;
    for (const Acc& a : partials) total.merge(a);
    return total;
}

}  // namespace conewhit

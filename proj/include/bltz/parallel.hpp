#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bltz {

/// Worker count resolution: 0 means "use hardware concurrency".
inline std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// Static block partition of [0, total) over `threads` workers.
/// fn(begin, end, worker) must only write worker-disjoint state; results are
/// then independent of the worker count.
template <class Fn>
void parallel_for_blocks(std::size_t total, std::size_t threads, Fn&& fn) {
    threads = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(total, 1));
    if (threads <= 1 || total <= 1) {
        fn(std::size_t{0}, total, std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (total + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        const std::size_t b = std::min(w * chunk, total);
        const std::size_t e = std::min(b + chunk, total);
        if (b >= e) break;
        pool.emplace_back([=, &fn] { fn(b, e, w); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace bltz

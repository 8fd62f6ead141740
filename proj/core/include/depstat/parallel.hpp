#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace depstat {

/// Resolve a worker count: 0 means "use hardware concurrency".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run body(i) for i in [0, count) on up to `threads` workers with static
/// chunking. Each index is processed exactly once and bodies must not share
/// mutable state, so results cannot depend on the thread count.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    threads = resolve_threads(threads);
    if (threads > count) threads = count;
    if (count <= 0) return;
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (int i = w; i < count; i += threads) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace depstat

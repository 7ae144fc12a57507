#include "symreg/threads.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace symreg {

namespace {

std::atomic<int> g_max_threads{0};

int detect_threads() {
    if (const char* env = std::getenv("SYMREG_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace

int max_threads() {
    int v = g_max_threads.load(std::memory_order_relaxed);
    if (v == 0) {
        v = detect_threads();
        g_max_threads.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_max_threads(int n) { g_max_threads.store(n >= 1 ? n : 1, std::memory_order_relaxed); }

int plan_workers(std::size_t n_items) {
    const int t = max_threads();
    if (n_items <= 1 || t <= 1) return 1;
    return n_items < static_cast<std::size_t>(t) ? static_cast<int>(n_items) : t;
}

void parallel_workers(std::size_t n_items, const std::function<void(int, std::size_t)>& fn) {
    const int T = plan_workers(n_items);
    if (T == 1) {
        for (std::size_t i = 0; i < n_items; ++i) fn(0, i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(T));
    for (int w = 0; w < T; ++w) {
        pool.emplace_back([w, T, n_items, &fn] {
            for (std::size_t i = static_cast<std::size_t>(w); i < n_items;
                 i += static_cast<std::size_t>(T))
                fn(w, i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace symreg

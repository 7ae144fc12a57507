#pragma once

#include <cstddef>
#include <functional>

namespace symreg {

/// Worker cap: SYMREG_THREADS when set, else hardware concurrency.
int max_threads();
void set_max_threads(int n);

/// Number of workers a loop of n items will actually use.
int plan_workers(std::size_t n_items);

/// Runs fn(worker, item) for item in [0,n). Worker w handles items
/// w, w+T, ... — items must write only to their own slots, so results are
/// identical for any worker count.
void parallel_workers(std::size_t n_items, const std::function<void(int, std::size_t)>& fn);

}  // namespace symreg

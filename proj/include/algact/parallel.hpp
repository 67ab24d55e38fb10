#pragma once

#include <cstddef>
#include <functional>

namespace algact {

// Worker count: the value set by set_thread_count, else ALGACT_THREADS,
// else the hardware concurrency. Never affects results.
int thread_count();

// 0 restores the environment default.
void set_thread_count(int n);

// Calls body(i) for every i in [0, n). Bodies must write only to slots
// owned by i; the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace algact

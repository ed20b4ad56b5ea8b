#pragma once

#include <cstddef>
#include <functional>

namespace tractdyn {

/// Worker count used by the data-parallel loops. Defaults to the hardware
/// concurrency; results never depend on it because every loop writes into
/// index-addressed slots and reductions run sequentially afterwards.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Exceptions from workers are rethrown on the
/// calling thread (the one with the smallest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tractdyn

#pragma once

#include <cstddef>
#include <functional>

namespace msl {

/// Worker count: MSL_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads. Each
/// index runs exactly once; the first exception thrown is rethrown here.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace msl

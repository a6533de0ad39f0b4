#pragma once

#include <cstddef>
#include <functional>

namespace rfdfar {

/// Worker count from RFDFAR_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Results must
/// be written to pre-sized, index-addressed storage; the first exception
/// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rfdfar

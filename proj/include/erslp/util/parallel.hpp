#pragma once

#include <cstddef>
#include <functional>

namespace erslp {

/// Process-wide cap on worker threads. 0 means hardware concurrency.
void set_worker_count(std::size_t n);
[[nodiscard]] std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work is distributed over at most worker_count()
/// threads; calls made from inside a running parallel_for execute serially, so the
/// cap holds across nested levels. Callers store results by index, which keeps
/// outputs independent of scheduling. The first exception thrown by any body is
/// rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace erslp

#pragma once

#include <cstddef>
#include <functional>

namespace hsicwb {

/// Worker count from HSICWB_THREADS, else the hardware concurrency (>= 1).
[[nodiscard]] std::size_t default_workers();

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out dynamically; callers write results by index so the outcome does
/// not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace hsicwb

#pragma once

// Fixed-size worker set for grid sweeps. Work items are claimed in index
// order; results land in caller-owned slots, so output order never depends
// on completion order.

#include <cstddef>
#include <functional>

namespace thermoswitch::cli {

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception (lowest index among those thrown) is rethrown after all workers
/// stop; remaining items are skipped once one has failed.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace thermoswitch::cli

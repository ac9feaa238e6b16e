#pragma once

#include <cstddef>
#include <functional>

namespace pgkit {

// Runs fn(i) for every i in [0, count). With threads <= 1 the loop runs
// inline; otherwise min(threads, count) transient workers pull indices from a
// shared counter. fn must be safe to call concurrently for distinct i and
// should write only to per-index slots so results cannot depend on
// scheduling. The first worker exception is rethrown after the join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace pgkit

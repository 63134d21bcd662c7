#pragma once

#include <cstddef>
#include <functional>

namespace rationale {

// Runs fn(i) for i in [0, count) across at most `threads` workers.
// Work is pure per index; callers own any output slots, so results are
// identical at any thread count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace rationale

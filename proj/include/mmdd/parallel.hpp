#pragma once

#include <cstddef>
#include <functional>

namespace mmdd {

// Runs fn over [0, n) split into contiguous chunks across up to `threads`
// workers. The callee writes disjoint output slots, so results cannot depend
// on the partitioning.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace mmdd

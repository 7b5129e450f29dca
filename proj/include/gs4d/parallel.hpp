#pragma once

#include <cstddef>
#include <functional>

namespace gs4d {

/// Worker count from GS4D_THREADS, else the hardware concurrency (at least 1).
int default_threads();

/// Calls fn(b) once for every b in [0, n_blocks) on up to `threads` workers
/// (0 means default_threads()). Blocks are handed out dynamically, so fn must
/// write its result into a slot owned by b; callers reduce those slots in
/// block order to stay independent of the worker count.
void for_each_block(std::size_t n_blocks, const std::function<void(std::size_t)>& fn, int threads = 0);

}  // namespace gs4d

#pragma once

#include <cstddef>
#include <functional>

namespace nfcorr {

// Number of worker threads for block-parallel loops. The NFCORR_THREADS
// environment variable overrides std::thread::hardware_concurrency.
std::size_t worker_count();

// Runs fn(block) for block in [0, num_blocks). Callers derive the block
// decomposition from the problem size alone, never from the worker count, and
// combine per-block results in a fixed order; outputs are then bit-identical
// for any number of workers. If a block throws, the exception from the
// lowest-indexed failing block is rethrown.
void parallel_for(std::size_t num_blocks, const std::function<void(std::size_t)>& fn);

}  // namespace nfcorr

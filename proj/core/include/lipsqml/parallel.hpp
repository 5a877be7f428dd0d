#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace lipsqml {

/// 0 means "one per hardware thread".
std::size_t resolve_threads(std::size_t requested);

/**
 * Runs body(i) for i in [0, count) on up to `threads` workers. Each index runs
 * exactly once; callers write results into slot i so the outcome does not
 * depend on scheduling. The first exception thrown by a body is rethrown.
 */
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)> &body);

/// Independent, reproducible generator for (master seed, stream id).
std::mt19937_64 make_rng(std::uint64_t master_seed, std::uint64_t stream);

} // namespace lipsqml

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace achronal {

/// Environment variable capping the worker count.
inline constexpr const char* kThreadCapVariable = "ACHRONAL_THREADS";

/// Number of workers: min(hardware_concurrency, ACHRONAL_THREADS if set), at least 1.
unsigned worker_count();

/// Runs body(i) for i in [0, count). Work is handed out in index order; the
/// caller owns any per-index output slots, so results never depend on the
/// number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Sums per-block partial results computed independently, then reduces them
/// pairwise in a fixed tree. Block boundaries depend only on `count` and
/// `block_size`, so the result is bit-identical for any worker count.
double deterministic_sum(std::size_t count, std::size_t block_size,
                         const std::function<double(std::size_t begin, std::size_t end)>& block_sum);

/// Pairwise (tree) summation of a vector in a fixed order.
double tree_sum(const std::vector<double>& values);

}  // namespace achronal

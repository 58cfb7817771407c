#pragma once

#include <cstddef>

namespace hashbench {

/// Caps the number of OpenMP threads used by every kernel. 0 restores the
/// runtime default.
void set_num_threads(int n);
int num_threads();

/// Rows per reduction chunk. Parallel reductions always split work into
/// chunks of this size and combine partial results in chunk order, so results
/// do not depend on the thread count.
inline constexpr std::size_t kReductionChunk = 256;

}  // namespace hashbench

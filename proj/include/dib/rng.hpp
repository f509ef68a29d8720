#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace dib {

/// Replicates are generated in fixed-size blocks; each block owns its own
/// generator, so output does not depend on how blocks are spread over
/// threads.
inline constexpr std::size_t kBlockSize = 1024;

/// Generator for block `block` of stream `stream` under `seed`.
std::mt19937_64 block_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block);

/// Calls fn(block, begin, end) for every block covering [0, count), on
/// `workers` threads (0 means hardware concurrency). The first exception
/// thrown by any block is rethrown after all threads join.
void for_each_block(std::size_t count, unsigned workers,
                    const std::function<void(std::size_t block, std::size_t begin, std::size_t end)>& fn);

/// Calls fn(i) for i in [0, count) on `workers` threads, one task per index.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace dib

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Per-pixel comparison kernels. `serial` is the straight-loop reference kept
// for testing and benchmarking; `parallel` splits the same loops across
// OpenMP threads once the buffer is large enough to pay for the fork. Both
// accumulate in integers, so their results are bit-identical.
namespace camscout::kernels {

namespace serial {
// Number of positions where a[i] != b[i]. Sizes must match.
std::size_t count_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::uint64_t sum(std::span<const std::uint8_t> px);
}  // namespace serial

namespace parallel {
std::size_t count_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::uint64_t sum(std::span<const std::uint8_t> px);
}  // namespace parallel

// Below this many pixels the parallel kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 1 << 16;

// Dispatches to parallel (which itself falls back to one thread on small
// inputs).
inline std::size_t count_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return parallel::count_changed(a, b);
}
inline std::uint64_t sum(std::span<const std::uint8_t> px) { return parallel::sum(px); }

}  // namespace camscout::kernels

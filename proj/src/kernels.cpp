#include "camscout/kernels.hpp"

#include <cstdint>

namespace camscout::kernels {

namespace serial {

std::size_t count_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i];
  return count;
}

std::uint64_t sum(std::span<const std::uint8_t> px) {
  std::uint64_t total = 0;
  for (auto v : px) total += v;
  return total;
}

}  // namespace serial

namespace parallel {

std::size_t count_changed(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const auto n = static_cast<std::int64_t>(a.size());
  const std::uint8_t* pa = a.data();
  const std::uint8_t* pb = b.data();
  std::int64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static) if (a.size() >= kParallelThreshold)
  for (std::int64_t i = 0; i < n; ++i) count += pa[i] != pb[i];
  return static_cast<std::size_t>(count);
}

std::uint64_t sum(std::span<const std::uint8_t> px) {
  const auto n = static_cast<std::int64_t>(px.size());
  const std::uint8_t* p = px.data();
  std::uint64_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static) if (px.size() >= kParallelThreshold)
  for (std::int64_t i = 0; i < n; ++i) total += p[i];
  return total;
}

}  // namespace parallel

}  // namespace camscout::kernels

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <type_traits>
#include <vector>

namespace hdp {

/// Worker count used when a caller passes 0: the machine's hardware
/// concurrency, at least 1.
unsigned default_workers();

/// Calls body(i) for every i in [0, n) on up to `workers` threads. Each index
/// runs exactly once; callers write results by index, so the outcome does not
/// depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& body);

/// Evaluates f(i) for i in [0, n) in parallel and returns the results in
/// index order.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F f) {
  using T = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<std::optional<T>> slots(n);
  parallel_for(n, workers, [&](std::size_t i) { slots[i].emplace(f(i)); });
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace hdp

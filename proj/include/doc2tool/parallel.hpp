#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace doc2tool {

// Applies fn to every item on at most `width` threads. Results keep input
// order. The first exception thrown by fn is rethrown after all workers join.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& items, size_t width, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> results(items.size());
  width = std::max<size_t>(1, std::min(width, items.size()));
  if (width <= 1) {
    for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  workers.reserve(width);
  for (size_t w = 0; w < width; ++w) {
    workers.emplace_back([&] {
      for (size_t i = next++; i < items.size(); i = next++) {
        if (failed) return;
        try {
          results[i] = fn(items[i]);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace doc2tool

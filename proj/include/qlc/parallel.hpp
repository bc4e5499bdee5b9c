#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace qlc {

/// Worker cap: QLC_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t thread_limit();

namespace detail {
bool& inside_parallel_region();
}

/// Evaluates f(0..n-1) on up to thread_limit() threads and returns the results
/// in index order. Calls made from inside a worker run sequentially. The first
/// exception by index is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using T = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = detail::inside_parallel_region() ? 1 : std::min(thread_limit(), n);

  auto run = [&](std::size_t first) {
    for (std::size_t i = first; i < n; i += workers) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        detail::inside_parallel_region() = true;
        run(w);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qlc

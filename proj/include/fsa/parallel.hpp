#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace fsa {

namespace detail {
inline std::atomic<int>& thread_cap_storage() {
  static std::atomic<int> cap{-1};
  return cap;
}
}  // namespace detail

/// Caps internal parallelism; 0 means one thread per hardware core.
inline void set_thread_cap(int cap) { detail::thread_cap_storage().store(std::max(cap, 0)); }

/// Effective worker count. Reads FSA_THREADS on first use unless set_thread_cap ran.
inline int thread_count() {
  int cap = detail::thread_cap_storage().load();
  if (cap < 0) {
    cap = 0;
    if (const char* env = std::getenv("FSA_THREADS")) {
      try {
        cap = std::max(std::stoi(env), 0);
      } catch (const std::exception&) {
        cap = 0;
      }
    }
    detail::thread_cap_storage().store(cap);
  }
  if (cap == 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cap;
}

/// Calls fn(i) for i in [0, count). Each index is written by exactly one
/// worker, so results stored per index are independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t minPerThread = 32) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()),
                                             std::max<std::size_t>(1, count / minPerThread));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fsa

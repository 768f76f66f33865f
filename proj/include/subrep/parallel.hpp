#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace subrep {

/// Worker count: `requested` when positive, else the process default set by
/// set_default_threads, else SUBREP_THREADS, else 1.
int resolve_threads(int requested);

void set_default_threads(int threads);

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and returns
/// the results in index order. Work is split into fixed strided ranges, so
/// the output never depends on the worker count. An exception thrown for the
/// lowest failing index is rethrown after all workers finish.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
  std::vector<T> out(count);
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(resolve_threads(threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            out[i] = fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// SplitMix64 of (seed, stream), used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace subrep

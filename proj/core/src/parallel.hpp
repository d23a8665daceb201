#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qcausal::detail {

inline unsigned worker_count(unsigned requested, std::uint64_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (work < n) n = static_cast<unsigned>(std::max<std::uint64_t>(work, 1));
  return n;
}

// Splits [0, n) into contiguous chunks, one accumulator per worker, and sums
// the accumulators in worker order. `trial(i, acc)` must depend only on i.
template <class Acc, class Fn>
Acc parallel_trials(std::uint64_t n, unsigned threads, const Acc& init, Fn&& trial) {
  const unsigned workers = worker_count(threads, n);
  std::vector<Acc> parts(workers, init);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = n * w / workers;
      const std::uint64_t hi = n * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] {
        try {
          for (std::uint64_t i = lo; i < hi; ++i) trial(i, parts[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Acc total = init;
  for (auto& p : parts) total += p;
  return total;
}

}  // namespace qcausal::detail

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace lk {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Fixed-shape pairwise reduction: the tree depends only on values.size().
inline double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Runs fn(block) for block in [0, count) on up to `workers` threads. Which
/// thread runs which block is irrelevant to callers that write results by
/// block index. The first exception thrown by any block is rethrown.
template <typename Fn>
void parallel_blocks(std::size_t count, int workers, Fn&& fn) {
  const std::size_t nthreads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t b = 0; b < count; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= count) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Sum of term(i) for i in [0, count): compensated within fixed-size blocks,
/// pairwise across blocks. Bitwise independent of the worker count.
template <typename Term>
double deterministic_sum(std::size_t count, int workers, Term&& term,
                         std::size_t block_size = 256) {
  const std::size_t nblocks = (count + block_size - 1) / block_size;
  std::vector<double> partial(nblocks, 0.0);
  parallel_blocks(nblocks, workers, [&](std::size_t b) {
    CompensatedSum s;
    const std::size_t end = std::min(count, (b + 1) * block_size);
    for (std::size_t i = b * block_size; i < end; ++i) s.add(term(i));
    partial[b] = s.value();
  });
  return pairwise_sum(partial);
}

}  // namespace lk

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sectorkit::detail {

// Smallest failing index in [0, count), or -1. Work is striped over `jobs`
// threads; the answer does not depend on the thread count.
template <class Fails>
long first_failure(long count, int jobs, Fails&& fails) {
  std::atomic<long> best{count};
  auto run = [&](int t, int stride) {
    for (long i = t; i < count && i < best.load(); i += stride) {
      if (fails(i)) {
        long cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {}
        return;
      }
    }
  };
  jobs = std::max(1, std::min<int>(jobs, 64));
  if (jobs == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(jobs);
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        try {
          run(t, jobs);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  long b = best.load();
  return b == count ? -1 : b;
}

}  // namespace sectorkit::detail

#ifndef MESO_PARALLEL_HPP
#define MESO_PARALLEL_HPP

#include <exception>
#include <thread>
#include <vector>

namespace meso {

// Static-partition parallel loop over [0, count). Each index must write only
// to its own output slot; results are then independent of scheduling. The
// first captured exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(int count, Fn&& fn, int max_threads = 0) {
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (max_threads > 0 && max_threads < hw) hw = max_threads;
  const int nthreads = std::min(hw, count);
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += nthreads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace meso

#endif

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace infolearn {

/// How a trial-indexed kernel is executed. `Serial` is the reference
/// implementation; `Parallel` distributes indices over OpenMP threads. Both
/// produce bit-identical output because each index owns its randomness and
/// results are reduced in index order.
enum class Exec { Serial, Parallel };

/// Evaluate `fn(i)` for i in [0, n) and return the results ordered by index.
template <typename Fn>
auto map_indexed(std::size_t n, Fn&& fn, Exec exec = Exec::Parallel) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  } else {
    const auto count = static_cast<std::int64_t>(n);
    // Exceptions must not escape an OpenMP region; keep the lowest-index one.
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      try {
        out[idx] = fn(idx);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return out;
}

/// Mean and standard error of a sample, summed in index order.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& values);

/// Worker count: explicit value if > 0, else INFOLEARN_WORKERS, else all cores.
int resolve_workers(int requested);

/// Run `fn` with OpenMP limited to `workers` threads, restoring the previous limit.
template <typename Fn>
void with_workers(int workers, Fn&& fn) {
  const int previous = omp_get_max_threads();
  omp_set_num_threads(resolve_workers(workers));
  try {
    fn();
  } catch (...) {
    omp_set_num_threads(previous);
    throw;
  }
  omp_set_num_threads(previous);
}

}  // namespace infolearn

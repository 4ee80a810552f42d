#include "infolearn/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace infolearn {

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  r.n = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.n);
  if (r.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(r.n - 1) / static_cast<double>(r.n));
  }
  return r;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("INFOLEARN_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
      // fall through to the default
    }
  }
  return omp_get_num_procs();
}

}  // namespace infolearn

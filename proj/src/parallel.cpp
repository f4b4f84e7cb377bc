#include "fairsmile/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace fairsmile {

namespace {
constexpr std::size_t kBlock = 4096;
}

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

double ordered_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
  if (n_blocks <= 1) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(n_blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace fairsmile

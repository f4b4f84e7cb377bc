#pragma once

#include <cstddef>
#include <span>

namespace fairsmile {

// Sets the OpenMP worker count for subsequent kernels; n <= 0 keeps the
// runtime default. Results never depend on this value.
void set_thread_count(int n);
[[nodiscard]] int thread_count();

// Sum with a fixed blocking that does not depend on the worker count, so
// reductions are bit-reproducible across --threads settings.
[[nodiscard]] double ordered_sum(std::span<const double> values);

}  // namespace fairsmile

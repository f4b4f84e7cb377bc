#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fairsmile/rng.hpp"

namespace fixtures {

inline std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  fairsmile::CounterStream rng(seed, 0, fairsmile::StreamDomain::fixtures);
  std::vector<double> x(n);
  for (auto& v : x) v = sd * rng.normal();
  return x;
}

// u = X - 1 with X ~ Exp(1): mean 0, variance 1, S = 2, kappa = 6.
inline std::vector<double> centered_exponentials(std::size_t n, std::uint64_t seed) {
  fairsmile::CounterStream rng(seed, 1, fairsmile::StreamDomain::fixtures);
  std::vector<double> x(n);
  for (auto& v : x) v = -std::log1p(-rng.uniform()) - 1.0;
  return x;
}

}  // namespace fixtures

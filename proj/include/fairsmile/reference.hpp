#pragma once

// Serial reference implementations of the OpenMP kernels. They favour the
// most direct loop structure over speed and exist so tests and benchmarks can
// compare the parallel kernels against them.

#include "fairsmile/hedge.hpp"
#include "fairsmile/models.hpp"

namespace fairsmile::reference {

[[nodiscard]] PathEnsemble simulate_gaussian(double vol, std::size_t horizon_days,
                                             std::size_t n_paths, std::uint64_t seed);
[[nodiscard]] PathEnsemble simulate_nonlinear_leverage(const NonlinearLeverageParams& p,
                                                       std::size_t horizon_days,
                                                       std::size_t n_paths, std::uint64_t seed);
[[nodiscard]] PathEnsemble simulate_gaarch(const GaarchParams& p, std::size_t horizon_days,
                                           std::size_t n_paths, std::uint64_t seed);

[[nodiscard]] std::vector<double> kernel_density_profile(std::span<const double> u,
                                                         std::span<const double> deltas);

[[nodiscard]] PriceEstimate hedged_price(const PathEnsemble& e, const ExoticPayoff& payoff,
                                         const HedgeConfig& h, std::size_t horizon = 0);

[[nodiscard]] double bootstrap_se(const Estimator& estimator, std::span<const double> samples,
                                  const BootstrapOptions& options);

}  // namespace fairsmile::reference

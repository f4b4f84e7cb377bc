#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fairsmile/hedge.hpp"
#include "fairsmile/parallel.hpp"
#include "fairsmile/reference.hpp"
#include "fairsmile/smile.hpp"
#include "fixtures.hpp"

using namespace fairsmile;

namespace {

struct ThreadScope {
  explicit ThreadScope(int n) { set_thread_count(n); }
  ~ThreadScope() { set_thread_count(0); }
};

template <class F>
auto with_threads(int n, F f) {
  ThreadScope scope(n);
  return f();
}

}  // namespace

TEST_CASE("simulators match the serial reference bit for bit") {
  const GaarchParams g{0.012, 0.85, 0.15};
  const NonlinearLeverageParams nl{0.01, 0.2, -0.1, 0.2};
  const auto a = simulate_gaarch(g, 12, 3001, 5);
  const auto b = reference::simulate_gaarch(g, 12, 3001, 5);
  CHECK(a.returns == b.returns);
  CHECK(a.pre_vol == b.pre_vol);
  CHECK(a.vol_floor_hits == b.vol_floor_hits);
  const auto c = simulate_nonlinear_leverage(nl, 12, 3001, 6);
  const auto d = reference::simulate_nonlinear_leverage(nl, 12, 3001, 6);
  CHECK(c.returns == d.returns);
  CHECK(c.pre_vol == d.pre_vol);
  CHECK(simulate_gaussian(0.02, 7, 999, 7).returns ==
        reference::simulate_gaussian(0.02, 7, 999, 7).returns);
}

TEST_CASE("outputs do not depend on the worker count") {
  for (int threads : {1, 2, 3, 8}) {
    CAPTURE(threads);
    const auto one = with_threads(1, [] { return simulate_gaarch(GaarchParams{}, 10, 5000, 9); });
    const auto many = with_threads(threads, [] { return simulate_gaarch(GaarchParams{}, 10, 5000, 9); });
    REQUIRE(one.returns == many.returns);

    const auto smile = [&] {
      return price_smile_exotics(one, KernelConfig{}, HedgeConfig{}).coefficients;
    };
    const auto s1 = with_threads(1, smile);
    const auto sn = with_threads(threads, smile);
    CHECK(s1.alpha == sn.alpha);
    CHECK(s1.beta == sn.beta);
    CHECK(s1.gamma == sn.gamma);
    CHECK(s1.gamma_se == sn.gamma_se);

    const auto u = fixtures::normals(30000, 4);
    const auto kd1 = with_threads(1, [&] { return kernel_density_profile(u, std::vector<double>{0.5, 0.3, 0.2}); });
    const auto kdn = with_threads(threads, [&] { return kernel_density_profile(u, std::vector<double>{0.5, 0.3, 0.2}); });
    CHECK(kd1 == kdn);

    BootstrapOptions boot;
    const auto se = [&] {
      return bootstrap_se([](std::span<const double> x) { return alpha_hat(x); }, u, boot);
    };
    CHECK(with_threads(1, se) == with_threads(threads, se));
  }
}

TEST_CASE("kernel sums and pricing agree with the reference") {
  const auto u = fixtures::normals(50000, 8);
  const std::vector<double> d{0.5, 0.4, 0.3, 0.25, 0.2};
  const auto fast = kernel_density_profile(u, d);
  const auto slow = reference::kernel_density_profile(u, d);
  for (std::size_t j = 0; j < d.size(); ++j) CHECK(fast[j] == doctest::Approx(slow[j]).epsilon(1e-12));

  const auto e = simulate_nonlinear_leverage(NonlinearLeverageParams{}, 10, 20000, 2);
  for (const auto& f : {ExoticPayoff::straddle(), ExoticPayoff::binary(),
                        ExoticPayoff::gaussian_window(0.3), ExoticPayoff::vanilla_call(-0.5)}) {
    for (bool hedged : {true, false}) {
      HedgeConfig h;
      h.enabled = hedged;
      const auto a = hedged_price(e, f, h, 7);
      const auto b = reference::hedged_price(e, f, h, 7);
      CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));
      CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-8));
    }
  }

  BootstrapOptions boot;
  boot.seed = 5;
  const auto est = [](std::span<const double> x) { return beta_hat(x); };
  CHECK(bootstrap_se(est, u, boot) == doctest::Approx(reference::bootstrap_se(est, u, boot)).epsilon(1e-12));
}

TEST_CASE("ordered_sum") {
  std::vector<double> x(100000);
  std::iota(x.begin(), x.end(), 0.0);
  CHECK(ordered_sum(x) == 99999.0 * 100000.0 / 2.0);
  CHECK(ordered_sum(std::vector<double>{}) == 0.0);
  CHECK(with_threads(1, [&] { return ordered_sum(x); }) == with_threads(4, [&] { return ordered_sum(x); }));
  set_thread_count(3);
  CHECK(thread_count() == 3);
  set_thread_count(0);
}

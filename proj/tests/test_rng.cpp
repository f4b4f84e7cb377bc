#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fairsmile/rng.hpp"

using fairsmile::CounterStream;
using fairsmile::Philox4x32;
using fairsmile::StreamDomain;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                             {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                             {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox is usable at compile time") {
  constexpr auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5);
}

TEST_CASE("streams are reproducible and separated by stream and domain") {
  CounterStream a(42, 7), b(42, 7), c(42, 8), d(42, 7, StreamDomain::bootstrap), e(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
    seen.insert(e.next_u64());
  }
  CHECK(seen.size() == 4000);
}

TEST_CASE("uniform and below stay in range") {
  CounterStream rng(1, 0);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    REQUIRE(rng.below(7) < 7u);
  }
  CHECK(sum / 1e5 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have unit moments") {
  CounterStream rng(3, 0);
  const int n = 400000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  // 5 sigma bands: sd of the sample moments is 1, sqrt2, sqrt15, sqrt96 over sqrt(n).
  CHECK(std::abs(m1) < 5 * 1.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 5 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3) < 5 * std::sqrt(96.0 / n));
}

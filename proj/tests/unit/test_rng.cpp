#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "taylorlaw/parallel.hpp"
#include "taylorlaw/rng.hpp"

using namespace taylorlaw;

// Reference words from numpy.random.Philox (which bumps the counter before
// the first block, hence counter c + 1 here).
TEST_CASE("Philox4x64-10 matches numpy reference blocks") {
  using C = Philox4x64::Counter;
  CHECK(Philox4x64::block(C{1, 0, 0, 0}, {0, 0}) ==
        C{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL});
  CHECK(Philox4x64::block(C{1, 0, 0, 0}, {7, 123}) ==
        C{0x23457b5ec3ce786fULL, 0xa08e6abb66337620ULL, 0x77ee9b928301b8ebULL, 0x11f670e0efa6dcf7ULL});
  CHECK(Philox4x64::block(C{42, 0, 0, 0}, {~0ULL, 5}) ==
        C{0xe88f084d410101dcULL, 0x5a13d7733f09d28cULL, 0x895de467e8c6ae9eULL, 0x6e6eaf851c74f860ULL});
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(9, StreamTag::kSample, 3), b(9, StreamTag::kSample, 3);
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());

  std::set<std::uint64_t> firsts;
  for (std::uint64_t idx = 0; idx < 50; ++idx) firsts.insert(Rng(9, StreamTag::kSample, idx)());
  firsts.insert(Rng(9, StreamTag::kBootstrap, 0)());
  firsts.insert(Rng(10, StreamTag::kSample, 0)());
  CHECK(firsts.size() == 52);
}

TEST_CASE("derive_seed is a fixed SplitMix64 mix") {
  // SplitMix64 first output for state 0 is 0xe220a8397b1dcdaf.
  CHECK(derive_seed(0, 0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("uniform variates stay in range") {
  Rng rng(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("below is unbiased on a non-power-of-two bound") {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 700'000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(7)];
  for (const int c : counts) CHECK(std::abs(c - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("normal and exponential moments") {
  Rng rng(3);
  const int n = 400'000;
  double s1 = 0, s2 = 0, e1 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    e1 += rng.exponential();
  }
  CHECK(s1 / n == Catch::Approx(0.0).margin(0.01));
  CHECK(s2 / n == Catch::Approx(1.0).margin(0.01));
  CHECK(e1 / n == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  set_thread_count(4);
  std::vector<int> slots(1000, 0);
  parallel_for(slots.size(), [&](std::size_t i) { slots[i] = static_cast<int>(i); });
  for (std::size_t i = 0; i < slots.size(); ++i) REQUIRE(slots[i] == static_cast<int>(i));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 5) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(0);
}

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nfg/shuffling.hpp"

using namespace nfg;

TEST_CASE("cyclic order is the identity every epoch") {
  const ShuffleStrategy cyclic{ShuffleKind::Cyclic, 99};
  for (std::uint64_t epoch : {0ull, 3ull, 1000ull}) {
    CHECK(permutation_for_epoch(cyclic, epoch, 4) == Permutation{0, 1, 2, 3});
  }
}

TEST_CASE("shuffle-once repeats the epoch-0 permutation") {
  const ShuffleStrategy so{ShuffleKind::ShuffleOnce, 42};
  const Permutation p0 = permutation_for_epoch(so, 0, 10);
  CHECK(permutation_for_epoch(so, 7, 10) == p0);
  const ShuffleStrategy rr{ShuffleKind::RandomReshuffle, 42};
  CHECK(permutation_for_epoch(rr, 0, 10) == p0);
}

TEST_CASE("random reshuffle draws fresh bijections") {
  Permutation identity(10);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ShuffleStrategy rr{ShuffleKind::RandomReshuffle, seed};
    const Permutation p0 = permutation_for_epoch(rr, 0, 10);
    const Permutation p1 = permutation_for_epoch(rr, 1, 10);
    CHECK(is_bijection(p0, 10));
    CHECK(is_bijection(p1, 10));
    CHECK_FALSE((p0 == identity && p1 == identity));
  }
}

TEST_CASE("permutations are deterministic in (kind, seed, epoch, n)") {
  const ShuffleStrategy rr{ShuffleKind::RandomReshuffle, 4242};
  CHECK(permutation_for_epoch(rr, 5, 64) == permutation_for_epoch(rr, 5, 64));
  CHECK(permutation_for_epoch(rr, 5, 64) != permutation_for_epoch(rr, 6, 64));
  const ShuffleStrategy other{ShuffleKind::RandomReshuffle, 4243};
  CHECK(permutation_for_epoch(rr, 5, 64) != permutation_for_epoch(other, 5, 64));
}

TEST_CASE("bijection property on random sizes") {
  CounterStream stream(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + stream.next_below(200);
    const ShuffleStrategy rr{ShuffleKind::RandomReshuffle, stream.next_u64()};
    CHECK(is_bijection(permutation_for_epoch(rr, trial, n), n));
  }
}

TEST_CASE("uniformity smoke test over S(4)") {
  // 10,000 draws over the 24 permutations of n=4; each count within 5 sigma
  const std::size_t draws = 10000;
  const double p = 1.0 / 24.0;
  const double expect = draws * p;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  std::vector<int> counts(24, 0);
  const ShuffleStrategy rr{ShuffleKind::RandomReshuffle, 2024};
  for (std::size_t epoch = 0; epoch < draws; ++epoch) {
    const Permutation perm = permutation_for_epoch(rr, epoch, 4);
    // rank the permutation: mixed-radix index
    int rank = 0;
    std::vector<std::size_t> pool{0, 1, 2, 3};
    int base = 6;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto at = std::find(pool.begin(), pool.end(), perm[k]) - pool.begin();
      rank += static_cast<int>(at) * base;
      pool.erase(pool.begin() + at);
      base /= static_cast<int>(3 - k);
    }
    counts[rank] += 1;
  }
  for (int c : counts) CHECK(std::fabs(c - expect) <= 5.0 * sigma);
}

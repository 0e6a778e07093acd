#pragma once

#include <cstdint>
#include <vector>

#include "nfg/errors.hpp"

namespace nfg {

// A bijection on {0,...,n-1}; order[t] is the component visited at inner step t.
using Permutation = std::vector<std::size_t>;

enum class ShuffleKind { RandomReshuffle, ShuffleOnce, Cyclic };

struct ShuffleStrategy {
  ShuffleKind kind = ShuffleKind::RandomReshuffle;
  std::uint64_t seed = 0;
};

// splitmix64 finalizer; the basis of the counter-mode generator below.
std::uint64_t mix64(std::uint64_t z);

// Stateless stream value keyed by (seed, epoch, draw). Permutations are a pure
// function of these three integers, so experiments replay bit-exactly without
// storing generator state.
std::uint64_t counter_value(std::uint64_t seed, std::uint64_t epoch, std::uint64_t draw);

// Small helper stream over counter_value: uniform doubles and normals for
// seeded instance generation.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t epoch = 0)
      : seed_(seed), epoch_(epoch) {}

  std::uint64_t next_u64() { return counter_value(seed_, epoch_, draw_++); }
  // Uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 random bits.
  double next_double();
  // Standard normal via Box-Muller.
  double next_normal();

 private:
  std::uint64_t seed_;
  std::uint64_t epoch_;
  std::uint64_t draw_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// RandomReshuffle: fresh Fisher-Yates permutation keyed by (seed, epoch).
// ShuffleOnce: the epoch-0 permutation for every epoch.
// Cyclic: identity order, no randomness.
Permutation permutation_for_epoch(const ShuffleStrategy& strategy, std::uint64_t epoch,
                                  std::size_t n);

bool is_bijection(const Permutation& perm, std::size_t n);

}  // namespace nfg

#include "nfg/shuffling.hpp"

#include <cmath>
#include <numeric>

namespace nfg {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t counter_value(std::uint64_t seed, std::uint64_t epoch, std::uint64_t draw) {
  std::uint64_t k = mix64(seed + 0x632be59bd9b4e019ull);
  k = mix64(k ^ (epoch + 0x9e3779b97f4a7c15ull));
  return mix64(k ^ (draw + 0xbf58476d1ce4e5b9ull));
}

std::uint64_t CounterStream::next_below(std::uint64_t bound) {
  // Lemire multiply-shift map of a 64-bit draw onto [0, bound).
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(bound);
  return static_cast<std::uint64_t>(wide >> 64);
}

double CounterStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = next_double();
  double u2 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

namespace {

Permutation identity_order(std::size_t n) {
  Permutation order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

Permutation fisher_yates(std::uint64_t seed, std::uint64_t epoch, std::size_t n) {
  Permutation order = identity_order(n);
  CounterStream stream(seed, epoch);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(stream.next_below(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

Permutation permutation_for_epoch(const ShuffleStrategy& strategy, std::uint64_t epoch,
                                  std::size_t n) {
  if (n == 0) throw ContractViolation("permutation size must be positive");
  switch (strategy.kind) {
    case ShuffleKind::Cyclic:
      return identity_order(n);
    case ShuffleKind::ShuffleOnce:
      return fisher_yates(strategy.seed, 0, n);
    case ShuffleKind::RandomReshuffle:
      return fisher_yates(strategy.seed, epoch, n);
  }
  throw ContractViolation("unknown shuffle kind");
}

bool is_bijection(const Permutation& perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::size_t v : perm) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

}  // namespace nfg

#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <boost/random/normal_distribution.hpp>

namespace osmax {

/// Counter-based seed derivation: a SplitMix64 finalizer over (master, stream, index).
/// Distinct (stream, index) pairs give statistically independent child seeds, so
/// replicates can run in any order or on any thread and reproduce bit-for-bit.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept;

/// Standard normal variates from a 64-bit Mersenne twister. Boost's ziggurat
/// implementation is used because it is fast and its output does not depend on
/// the standard library vendor.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }
  void fill(std::span<double> out) {
    for (double& v : out) v = dist_(engine_);
  }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> dist_;
};

}  // namespace osmax

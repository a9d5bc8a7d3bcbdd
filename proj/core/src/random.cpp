#include "osmax/random.hpp"

namespace osmax {

namespace {

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix(mix(mix(master) ^ stream) ^ (index * 0xd1b54a32d192ed03ULL));
}

}  // namespace osmax

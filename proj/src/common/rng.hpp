#pragma once

#include <cstdint>
#include <random>

namespace kgeft {

// Counted splittable seeding: every consumer asks for a numbered stream of the
// run seed, so adding a consumer never perturbs the draws of another one.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : seed_(seed) {}
  std::mt19937_64 stream(std::uint64_t id) const {
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed_ ^ splitmix64(id))),
                      static_cast<std::uint32_t>(splitmix64(seed_ + id) >> 32),
                      static_cast<std::uint32_t>(id)};
    return std::mt19937_64(seq);
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace kgeft

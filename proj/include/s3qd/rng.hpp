#pragma once

#include <cstdint>
#include <limits>

namespace s3qd {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based generator: output k of stream s is a pure function of (seed, s, k),
// so trials can be split across threads without changing results.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t operator()() {
    std::uint64_t k = splitmix64(seed_ ^ splitmix64(stream_ + 0x632be59bd9b4e019ULL));
    return splitmix64(k + counter_++ * 0xd1342543de82ef95ULL);
  }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t lim = max() - max() % n;
    for (;;) {
      std::uint64_t r = (*this)();
      if (r < lim) return r % n;
    }
  }

  Rng stream(std::uint64_t s) const { return Rng(seed_, splitmix64(stream_) ^ s); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace s3qd

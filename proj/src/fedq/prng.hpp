#ifndef FEDQ_PRNG_HPP
#define FEDQ_PRNG_HPP

#include <cstdint>

namespace fedq {

// Deterministic splitmix64 stream; identical across platforms so seeded
// scenario reruns stay byte-identical.
class Prng {
  public:
    explicit Prng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound)
    uint64_t below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    // uniform integer in [lo, hi]
    long range(long lo, long hi) { return lo + (long)below(uint64_t(hi - lo + 1)); }

    double unit() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }

  private:
    uint64_t state_;
};

}  // namespace fedq

#endif

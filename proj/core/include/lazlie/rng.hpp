// Deterministic RNG for the randomized suites.  mt19937_64 plus explicit
// rejection sampling; std::uniform_int_distribution is implementation-defined
// and would break the byte-identical-output contract across standard libraries.

#ifndef LAZLIE_RNG_HPP
#define LAZLIE_RNG_HPP

#include <cstdint>
#include <random>

#include "lazlie/fp.hpp"

namespace lazlie {

class Rng {
  public:
    explicit Rng(u64 seed) : g_(seed) {}

    u64 next() { return g_(); }

    // uniform in [0, n)
    u32 below(u32 n) {
        if (n <= 1) return 0;
        u64 limit = (~u64{0} / n) * n;
        u64 x;
        do { x = g_(); } while (x >= limit);
        return static_cast<u32>(x % n);
    }

    u32 fp(u32 p) { return below(p); }

    u32 nonzero_fp(u32 p) { return 1 + below(p - 1); }

    Vec vec(std::size_t n, u32 p) {
        Vec v(n);
        for (auto& x : v) x = below(p);
        return v;
    }

    // child generator with decorrelated stream, for per-instance determinism
    Rng fork() { return Rng(g_() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 g_;
};

}  // namespace lazlie

#endif

#pragma once

#include <cstdint>
#include <random>

namespace emcert {

// Deterministic pseudorandom source: std::mt19937_64 with the top 53 bits
// of each output scaled into [0,1). mt19937_64 is fully specified by the
// standard and the scaling avoids std::uniform_real_distribution, whose
// output is implementation-defined; the same seed therefore reproduces the
// same stream on every platform.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const int span = hi - lo + 1;
        int v = lo + static_cast<int>(uniform01() * span);
        return v > hi ? hi : v;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace emcert

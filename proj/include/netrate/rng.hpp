#pragma once

#include <cstdint>

namespace netrate {

// SplitMix64 generator: tiny state, full-period, reproducible everywhere.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on (0, 1]: never returns 0, so -log(u) is always finite
    double uniform01() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * log_u(); }

  private:
    double log_u();
};

// Substream derivation rule: the stream with index `stream` under `master`
// is seeded with mix(master) XOR mix(stream * golden + 1), where mix is the
// SplitMix64 output function. Streams are independent for practical purposes
// and stable across platforms and run order.
SplitMix64 substream(uint64_t master, uint64_t stream);

}

#include "netrate/rng.hpp"

#include <cmath>

namespace netrate {

namespace {

uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

double SplitMix64::log_u() { return std::log(uniform01()); }

SplitMix64 substream(uint64_t master, uint64_t stream) {
    return SplitMix64(mix(master) ^ mix(stream * 0x9E3779B97F4A7C15ULL + 1));
}

}

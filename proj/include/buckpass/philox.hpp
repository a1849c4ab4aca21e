#pragma once

#include <cstdint>

namespace buckpass {

// Philox4x32-10 counter-based generator (Salmon et al. reference constants).
// Each (seed, stream) pair is an independent sequence addressed by a 64-bit
// counter, so replicas replay bit-exactly and in any order.
class Philox {
public:
    Philox(uint64_t seed, uint32_t stream = 0)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)),
          stream_(stream) {}

    uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        uint32_t c0 = static_cast<uint32_t>(counter_);
        uint32_t c1 = static_cast<uint32_t>(counter_ >> 32);
        uint32_t c2 = stream_;
        uint32_t c3 = 0;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(0xD2511F53u) * c0;
            const uint64_t p1 = static_cast<uint64_t>(0xCD9E8D57u) * c2;
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            const uint32_t n0 = hi1 ^ c1 ^ k0;
            const uint32_t n1 = lo1;
            const uint32_t n2 = hi0 ^ c3 ^ k1;
            const uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        ++counter_;
        spare_ = (static_cast<uint64_t>(c2) << 32) | c3;
        have_spare_ = true;
        return (static_cast<uint64_t>(c0) << 32) | c1;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection (bound >= 1).
    uint64_t next_below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % bound;
    }

private:
    uint32_t key0_, key1_, stream_;
    uint64_t counter_ = 0;
    uint64_t spare_ = 0;
    bool have_spare_ = false;
};

} // namespace buckpass

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace phantom {

// Philox4x64-10 counter-based generator. Pure integer arithmetic, so the
// stream is bit-identical across platforms and any block can be regenerated
// in isolation from (key, counter) alone.
struct Philox4x64 {
    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                        std::uint64_t& lo) {
        const unsigned __int128 p =
            static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(M0, ctr[0], hi0, lo0);
            mulhilo(M1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

inline double u64_to_unit_open(std::uint64_t x) {
    // in (0,1]; safe as the argument of log()
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

inline double u64_to_unit(std::uint64_t x) {
    // in [0,1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// One standard-normal pair per Philox block via Box-Muller.
inline void gaussian_pair(const std::array<std::uint64_t, 4>& blk, double& z0,
                          double& z1) {
    const double u1 = u64_to_unit_open(blk[0]);
    const double u2 = u64_to_unit(blk[1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(2.0 * M_PI * u2);
    z1 = r * std::sin(2.0 * M_PI * u2);
}

}  // namespace phantom

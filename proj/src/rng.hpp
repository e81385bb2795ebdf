#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace fpp {

/// Seed triple identifying one reproducible random stream. Identical
/// (master, replica, label) always reproduces the same draws, regardless of
/// which thread runs them or what other streams exist.
struct RngSeed {
    std::uint64_t master = 0;
    std::uint32_t replica = 0;
    std::string label;
};

std::uint32_t fnv1a32(std::string_view s);
std::uint64_t fnv1a64(std::string_view s);

/// Philox4x32-10 counter-based generator. The key is derived from the master
/// seed; the 128-bit counter carries (draw index, replica, label hash), so
/// streams never overlap and can be created in any order.
class RngStream {
public:
    explicit RngStream(const RngSeed& seed);
    RngStream(std::uint64_t master, std::uint32_t replica, std::string_view label);

    std::uint64_t next_u64();
    /// Uniform on [0,1) with 53 random bits.
    double uniform();
    /// Uniform on (0,1]; safe as a log() argument.
    double uniform_pos();
    /// Standard normal via Box-Muller (pairs cached).
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Raw block access, used by coordinate-hash helpers.
    static std::array<std::uint32_t, 4> block(std::uint32_t k0, std::uint32_t k1,
                                              std::uint32_t c0, std::uint32_t c1,
                                              std::uint32_t c2, std::uint32_t c3);

private:
    std::uint32_t key0_, key1_, ctr2_, ctr3_;
    std::uint64_t index_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;

    std::uint32_t next_u32();
};

/// Deterministic uniform in [0,1) attached to a point by hashing its
/// coordinate bit patterns together with (seed, label). Two colourings built
/// from the same cloud and seed therefore see identical per-point uniforms,
/// which is what makes the monotone couplings exact.
double coordinate_hash_uniform(std::uint64_t master, std::string_view label,
                               const std::array<double, 3>& x, int dim);

}  // namespace fpp

#include "rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace fpp {

std::uint32_t fnv1a32(std::string_view s) {
    std::uint32_t h = 0x811c9dc5u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x01000193u;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::uint32_t k0,
                         std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::block(std::uint32_t k0, std::uint32_t k1,
                                              std::uint32_t c0, std::uint32_t c1,
                                              std::uint32_t c2, std::uint32_t c3) {
    std::array<std::uint32_t, 4> x{c0, c1, c2, c3};
    for (int r = 0; r < 10; ++r) {
        philox_round(x, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

RngStream::RngStream(const RngSeed& seed)
    : RngStream(seed.master, seed.replica, seed.label) {}

RngStream::RngStream(std::uint64_t master, std::uint32_t replica,
                     std::string_view label)
    : key0_(static_cast<std::uint32_t>(master)),
      key1_(static_cast<std::uint32_t>(master >> 32)),
      ctr2_(replica),
      ctr3_(fnv1a32(label)) {}

std::uint32_t RngStream::next_u32() {
    if (buf_pos_ == 4) {
        buf_ = block(key0_, key1_, static_cast<std::uint32_t>(index_),
                     static_cast<std::uint32_t>(index_ >> 32), ctr2_, ctr3_);
        ++index_;
        buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x < limit) return x % n;
    }
}

double coordinate_hash_uniform(std::uint64_t master, std::string_view label,
                               const std::array<double, 3>& x, int dim) {
    std::uint64_t bits[3] = {0, 0, 0};
    for (int a = 0; a < dim; ++a) bits[a] = std::bit_cast<std::uint64_t>(x[a]);
    // Fold the coordinate bits into the 128-bit counter; the label keeps
    // independent per-point purposes (cell colour, radius, ...) on
    // independent streams.
    const std::uint64_t mixed = bits[0] * 0x9E3779B97F4A7C15ull ^
                                (bits[1] * 0xC2B2AE3D27D4EB4Full) ^
                                (bits[2] * 0x165667B19E3779F9ull);
    const auto key0 = static_cast<std::uint32_t>(master);
    const auto key1 = static_cast<std::uint32_t>(master >> 32);
    const auto out = RngStream::block(
        key0, key1, static_cast<std::uint32_t>(mixed),
        static_cast<std::uint32_t>(mixed >> 32),
        static_cast<std::uint32_t>(bits[0] ^ (bits[2] << 1)), fnv1a32(label));
    const std::uint64_t v = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace fpp

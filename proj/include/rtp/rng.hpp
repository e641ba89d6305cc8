#pragma once
// Counter-based random number generation (Philox4x32-10).
//
// Every Monte Carlo consumer in this project draws from a (master_seed,
// stream) pair.  Stream s of a run is completely determined by those two
// integers, independent of thread scheduling or evaluation order, so any
// replicate can be replayed bit-identically in isolation.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rtp {

// Philox4x32 with 10 rounds.  Key = master seed, counter lanes 2/3 = stream
// id, lanes 0/1 = running block index.  One block yields four 32-bit words.
class Philox {
public:
    Philox(std::uint64_t master_seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint64_t master_seed() const {
        return (static_cast<std::uint64_t>(key1_) << 32) | key0_;
    }
    std::uint64_t stream() const {
        return (static_cast<std::uint64_t>(stream_hi_) << 32) | stream_lo_;
    }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) {
            block(static_cast<std::uint32_t>(block_index_),
                  static_cast<std::uint32_t>(block_index_ >> 32), buf_);
            ++block_index_;
            buf_pos_ = 0;
        }
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1]; safe as a log() argument.
    double next_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the spare half is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = next_open();
        double v = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        double c = std::cos(6.283185307179586476925286766559 * v);
        double s = std::sin(6.283185307179586476925286766559 * v);
        spare_ = r * s;
        has_spare_ = true;
        return r * c;
    }

    void fill_gaussian(double* out, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) out[i] = next_gaussian();
    }

    double next_rademacher() { return (next_u32() & 1u) ? 1.0 : -1.0; }

    // Raw single block, exposed for the known-answer tests.
    static void raw_block(const std::uint32_t ctr[4], const std::uint32_t key[2],
                          std::uint32_t out[4]) {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
            std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }

private:
    void block(std::uint32_t bi_lo, std::uint32_t bi_hi, std::uint32_t out[4]) {
        const std::uint32_t ctr[4] = {bi_lo, bi_hi, stream_lo_, stream_hi_};
        const std::uint32_t key[2] = {key0_, key1_};
        raw_block(ctr, key, out);
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_index_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rtp

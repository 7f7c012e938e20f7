#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace moonlab {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr int kRounds = 10;

    static constexpr Counter apply(Counter ctr, Key key) {
        for (int round = 0; round < kRounds; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t prod0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t prod1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(prod0);
            const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(prod1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

namespace rng {

/// The two 64-bit words produced for block `block` of stream (seed, stream_id).
/// Draw index d maps to block d/2, word d%2.
constexpr std::array<std::uint64_t, 2> block_words(std::uint64_t seed, std::uint64_t stream_id,
                                                   std::uint64_t block) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block),
                                  static_cast<std::uint32_t>(block >> 32),
                                  static_cast<std::uint32_t>(stream_id),
                                  static_cast<std::uint32_t>(stream_id >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    const auto r = Philox4x32::apply(ctr, key);
    return {(std::uint64_t{r[0]} << 32) | r[1], (std::uint64_t{r[2]} << 32) | r[3]};
}

/// Uniform in [0,1) carrying the top 52 bits of `word`; exact multiple of 2^-52.
inline double word_to_unit(std::uint64_t word) {
    return std::bit_cast<double>((word >> 12) | 0x3ff0000000000000ULL) - 1.0;
}

}  // namespace rng

/// Deterministic stream of uniforms indexed by (seed, stream_id, draw index).
/// Single owner; use one stream per worker.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t position = 0)
        : seed_(seed), stream_id_(stream_id), position_(position) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    /// Index of the next draw.
    std::uint64_t position() const noexcept { return position_; }

    /// Repositions the stream; the next draw is draw `position`.
    void seek(std::uint64_t position) noexcept { position_ = position; }

    std::uint64_t next_word() {
        const std::uint64_t block = position_ >> 1;
        if (!cached_ || cached_block_ != block) {
            cache_ = rng::block_words(seed_, stream_id_, block);
            cached_block_ = block;
            cached_ = true;
        }
        return cache_[position_++ & 1];
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_;
    std::array<std::uint64_t, 2> cache_{};
    std::uint64_t cached_block_ = 0;
    bool cached_ = false;
};

/// Weibull(shape k, scale lambda) lifetime law; shape 1 is the exponential.
struct DistributionSpec {
    double shape = 1.0;
    double scale = 1.0;

    bool operator==(const DistributionSpec&) const = default;
};

/// Throws ValidationError unless shape and scale are finite and positive.
void validate(const DistributionSpec& dist);

RandomStream make_stream(std::uint64_t seed, std::uint64_t stream_id);

/// Advances the stream by one draw; result in [0,1).
double sample_uniform(RandomStream& stream);

/// scale * (-ln(1-u))^(1/shape). Throws DomainError for u outside [0,1).
double weibull_inverse_cdf(double u, const DistributionSpec& dist);

/// 1 with probability p (u < p), consuming exactly one draw.
/// Throws DomainError for p outside [0,1].
bool sample_bernoulli(RandomStream& stream, double p);

}  // namespace moonlab

// AVX2 variants of the sampling kernels. Each vector lane repeats the scalar
// operation sequence from fastmath.hpp / scalar.cpp, so results are bit-identical.

#include <immintrin.h>

#include "kernel_sets.hpp"
#include "moonlab/fastmath.hpp"
#include "moonlab/random.hpp"

namespace moonlab::kernels::detail {

namespace {

namespace fm = moonlab::fastmath::detail;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline __m256d log_positive(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    // Biased exponent to double via the 2^52 magic constant; exact for 0..2047.
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    const __m256d magic = splat(4503599627370496.0);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(magic))), magic);
    e = _mm256_sub_pd(e, splat(1023.0));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(fm::kMantissaMask))),
                        _mm256_set1_epi64x(static_cast<long long>(fm::kOneBits))));
    const __m256d big = _mm256_cmp_pd(m, splat(fm::kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, splat(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, splat(1.0)), big);

    const __m256d f = _mm256_sub_pd(m, splat(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(splat(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d t1 = _mm256_mul_pd(
        w, _mm256_add_pd(splat(fm::kLg2),
                         _mm256_mul_pd(w, _mm256_add_pd(splat(fm::kLg4), _mm256_mul_pd(w, splat(fm::kLg6))))));
    const __m256d t2 = _mm256_mul_pd(
        z, _mm256_add_pd(
               splat(fm::kLg1),
               _mm256_mul_pd(w, _mm256_add_pd(splat(fm::kLg3),
                                              _mm256_mul_pd(w, _mm256_add_pd(splat(fm::kLg5),
                                                                             _mm256_mul_pd(w, splat(fm::kLg7))))))));
    const __m256d r = _mm256_add_pd(t2, t1);
    const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(splat(0.5), f), f);
    const __m256d inner =
        _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)), _mm256_mul_pd(e, splat(fm::kLn2Lo)));
    return _mm256_sub_pd(_mm256_mul_pd(e, splat(fm::kLn2Hi)), _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

inline __m256d exp_clamped(__m256d x) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, splat(fm::kInvLn2)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d hi = _mm256_sub_pd(x, _mm256_mul_pd(k, splat(fm::kLn2Hi)));
    const __m256d lo = _mm256_mul_pd(k, splat(fm::kLn2Lo));
    const __m256d r = _mm256_sub_pd(hi, lo);
    const __m256d rr = _mm256_mul_pd(r, r);
    const __m256d poly = _mm256_add_pd(
        splat(fm::kP1),
        _mm256_mul_pd(rr, _mm256_add_pd(
                              splat(fm::kP2),
                              _mm256_mul_pd(rr, _mm256_add_pd(splat(fm::kP3),
                                                              _mm256_mul_pd(rr, _mm256_add_pd(splat(fm::kP4),
                                                                                              _mm256_mul_pd(rr, splat(fm::kP5)))))))));
    const __m256d c = _mm256_sub_pd(r, _mm256_mul_pd(rr, poly));
    const __m256d frac = _mm256_div_pd(_mm256_mul_pd(r, c), _mm256_sub_pd(splat(2.0), c));
    const __m256d y = _mm256_sub_pd(splat(1.0), _mm256_sub_pd(_mm256_sub_pd(lo, frac), hi));

    // k to int64 through the 1.5 * 2^52 shifter, then build 2^k.
    const __m256d shifter = splat(6755399441055744.0);
    const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, shifter)), _mm256_castpd_si256(shifter));
    const __m256i pow_bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
    __m256d result = _mm256_mul_pd(y, _mm256_castsi256_pd(pow_bits));

    result = _mm256_blendv_pd(result, splat(HUGE_VAL), _mm256_cmp_pd(x, splat(fm::kExpMax), _CMP_GT_OQ));
    result = _mm256_blendv_pd(result, _mm256_setzero_pd(), _mm256_cmp_pd(x, splat(fm::kExpMin), _CMP_LT_OQ));
    return result;
}

inline __m256d neg_log1m(__m256d u) {
    const __m256d v = _mm256_sub_pd(splat(1.0), u);
    const __m256d d = _mm256_sub_pd(_mm256_sub_pd(splat(1.0), v), u);
    const __m256d neg = _mm256_sub_pd(_mm256_xor_pd(log_positive(v), splat(-0.0)), _mm256_div_pd(d, v));
    return _mm256_blendv_pd(neg, _mm256_setzero_pd(), _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_EQ_OQ));
}

inline __m256d words_to_unit(__m256i words) {
    const __m256i bits = _mm256_or_si256(_mm256_srli_epi64(words, 12), _mm256_set1_epi64x(0x3ff0000000000000LL));
    return _mm256_sub_pd(_mm256_castsi256_pd(bits), splat(1.0));
}

// Philox4x32-10 on four consecutive blocks; 32-bit words live in the low half of 64-bit lanes.
inline void philox4(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t block, __m256i& word0, __m256i& word1) {
    const __m256i mask = _mm256_set1_epi64x(0xffffffffLL);
    __m256i c0 = _mm256_set_epi64x(static_cast<long long>((block + 3) & 0xffffffffu),
                                   static_cast<long long>((block + 2) & 0xffffffffu),
                                   static_cast<long long>((block + 1) & 0xffffffffu),
                                   static_cast<long long>(block & 0xffffffffu));
    __m256i c1 = _mm256_set_epi64x(static_cast<long long>((block + 3) >> 32), static_cast<long long>((block + 2) >> 32),
                                   static_cast<long long>((block + 1) >> 32), static_cast<long long>(block >> 32));
    __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(stream_id & 0xffffffffu));
    __m256i c3 = _mm256_set1_epi64x(static_cast<long long>(stream_id >> 32));
    const __m256i mul0 = _mm256_set1_epi64x(Philox4x32::kMul0);
    const __m256i mul1 = _mm256_set1_epi64x(Philox4x32::kMul1);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < Philox4x32::kRounds; ++round) {
        if (round > 0) {
            k0 += Philox4x32::kWeyl0;
            k1 += Philox4x32::kWeyl1;
        }
        const __m256i prod0 = _mm256_mul_epu32(c0, mul0);
        const __m256i prod1 = _mm256_mul_epu32(c2, mul1);
        const __m256i hi0 = _mm256_srli_epi64(prod0, 32);
        const __m256i lo0 = _mm256_and_si256(prod0, mask);
        const __m256i hi1 = _mm256_srli_epi64(prod1, 32);
        const __m256i lo1 = _mm256_and_si256(prod1, mask);
        const __m256i nc0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi64x(k0));
        const __m256i nc2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi64x(k1));
        c0 = nc0;
        c1 = lo1;
        c2 = nc2;
        c3 = lo0;
    }
    word0 = _mm256_or_si256(_mm256_slli_epi64(c0, 32), c1);
    word1 = _mm256_or_si256(_mm256_slli_epi64(c2, 32), c3);
}

void avx2_fill_uniforms(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t first_draw, double* out,
                        std::size_t count) {
    std::size_t i = 0;
    std::uint64_t draw = first_draw;
    if ((draw & 1) != 0 && count > 0) {
        scalar_fill_uniforms(seed, stream_id, draw, out, 1);
        ++i;
        ++draw;
    }
    for (; i + 8 <= count; i += 8, draw += 8) {
        __m256i w0, w1;
        philox4(seed, stream_id, draw >> 1, w0, w1);
        const __m256d u0 = words_to_unit(w0);  // draws 0,2,4,6
        const __m256d u1 = words_to_unit(w1);  // draws 1,3,5,7
        const __m256d lo = _mm256_unpacklo_pd(u0, u1);
        const __m256d hi = _mm256_unpackhi_pd(u0, u1);
        _mm256_storeu_pd(out + i, _mm256_permute2f128_pd(lo, hi, 0x20));
        _mm256_storeu_pd(out + i + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
    }
    if (i < count) scalar_fill_uniforms(seed, stream_id, draw, out + i, count - i);
}

void avx2_weibull_transform(double* data, std::size_t count, double shape, double scale) {
    const bool unit = shape == 1.0;
    const __m256d inv_shape = splat(1.0 / shape);
    const __m256d vscale = splat(scale);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d e = neg_log1m(_mm256_loadu_pd(data + i));
        __m256d x;
        if (unit) {
            x = _mm256_mul_pd(vscale, e);
        } else {
            x = _mm256_mul_pd(vscale, exp_clamped(_mm256_mul_pd(log_positive(e), inv_shape)));
            x = _mm256_blendv_pd(x, _mm256_setzero_pd(), _mm256_cmp_pd(e, _mm256_setzero_pd(), _CMP_EQ_OQ));
        }
        _mm256_storeu_pd(data + i, x);
    }
    if (i < count) scalar_weibull_transform(data + i, count - i, shape, scale);
}

inline __m256d select3(__m256d a, __m256d b, __m256d c, std::size_t rank) {
    const __m256d lo = _mm256_min_pd(a, b);
    const __m256d hi = _mm256_max_pd(a, b);
    switch (rank) {
        case 0: return _mm256_min_pd(lo, c);
        case 2: return _mm256_max_pd(hi, c);
        default: return _mm256_max_pd(lo, _mm256_min_pd(hi, c));
    }
}

void avx2_combine_select(const double* lifetimes, const double* raw, std::size_t stride, std::size_t count,
                         const CombineParams& params, double* out) {
    if (params.n != 3) {
        scalar_combine_select(lifetimes, raw, stride, count, params, out);
        return;
    }
    const __m256d p = splat(params.p);
    const __m256d q = splat(1.0 - params.p);
    const auto s = static_cast<long long>(stride);
    const __m256i gather_index = _mm256_set_epi64x(3 * s, 2 * s, s, 0);

    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const double* w = lifetimes + i * 4;
        const __m256d r0 = _mm256_loadu_pd(w);
        const __m256d r1 = _mm256_loadu_pd(w + 4);
        const __m256d r2 = _mm256_loadu_pd(w + 8);
        const __m256d r3 = _mm256_loadu_pd(w + 12);
        const __m256d t0 = _mm256_unpacklo_pd(r0, r1);
        const __m256d t1 = _mm256_unpackhi_pd(r0, r1);
        const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
        const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
        const __m256d x0 = _mm256_permute2f128_pd(t0, t2, 0x20);
        __m256d y1 = _mm256_permute2f128_pd(t1, t3, 0x20);
        __m256d y2 = _mm256_permute2f128_pd(t0, t2, 0x31);
        __m256d y3 = _mm256_permute2f128_pd(t1, t3, 0x31);

        const double* flags = raw + i * stride + 4;
        switch (params.model) {
            case DependencyModel::Linear: {
                const __m256d shared = _mm256_mul_pd(p, x0);
                y1 = _mm256_add_pd(_mm256_mul_pd(q, y1), shared);
                y2 = _mm256_add_pd(_mm256_mul_pd(q, y2), shared);
                y3 = _mm256_add_pd(_mm256_mul_pd(q, y3), shared);
                break;
            }
            case DependencyModel::GlobalCCF: {
                const __m256d xi = _mm256_cmp_pd(_mm256_i64gather_pd(flags, gather_index, 8), p, _CMP_LT_OQ);
                y1 = _mm256_blendv_pd(y1, x0, xi);
                y2 = _mm256_blendv_pd(y2, x0, xi);
                y3 = _mm256_blendv_pd(y3, x0, xi);
                break;
            }
            case DependencyModel::MarginalCCF: {
                y1 = _mm256_blendv_pd(y1, x0, _mm256_cmp_pd(_mm256_i64gather_pd(flags, gather_index, 8), p, _CMP_LT_OQ));
                y2 = _mm256_blendv_pd(y2, x0, _mm256_cmp_pd(_mm256_i64gather_pd(flags + 1, gather_index, 8), p, _CMP_LT_OQ));
                y3 = _mm256_blendv_pd(y3, x0, _mm256_cmp_pd(_mm256_i64gather_pd(flags + 2, gather_index, 8), p, _CMP_LT_OQ));
                break;
            }
        }
        _mm256_storeu_pd(out + i, select3(y1, y2, y3, params.rank));
    }
    if (i < count) {
        scalar_combine_select(lifetimes + i * 4, raw + i * stride, stride, count - i, params, out + i);
    }
}

}  // namespace

const KernelSet& avx2_kernels() {
    static const KernelSet set{Isa::Avx2, &avx2_fill_uniforms, &avx2_weibull_transform, &avx2_combine_select};
    return set;
}

}  // namespace moonlab::kernels::detail

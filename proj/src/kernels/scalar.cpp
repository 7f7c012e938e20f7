#include <algorithm>
#include <array>

#include "kernel_sets.hpp"
#include "moonlab/errors.hpp"
#include "moonlab/fastmath.hpp"
#include "moonlab/random.hpp"

namespace moonlab::kernels {

double select_rank(std::span<const double> values, std::size_t rank) {
    if (rank >= values.size()) throw DomainError("select_rank: rank out of range");
    std::array<double, 64> small{};
    std::vector<double> large;
    double* buf = small.data();
    if (values.size() > small.size()) {
        large.assign(values.begin(), values.end());
        buf = large.data();
    } else {
        std::copy(values.begin(), values.end(), buf);
    }
    std::nth_element(buf, buf + rank, buf + values.size());
    return buf[rank];
}

namespace detail {

void scalar_fill_uniforms(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t first_draw,
                          double* out, std::size_t count) {
    std::size_t i = 0;
    std::uint64_t draw = first_draw;
    if ((draw & 1) != 0 && count > 0) {
        out[i++] = rng::word_to_unit(rng::block_words(seed, stream_id, draw >> 1)[1]);
        ++draw;
    }
    for (; i + 2 <= count; i += 2, draw += 2) {
        const auto words = rng::block_words(seed, stream_id, draw >> 1);
        out[i] = rng::word_to_unit(words[0]);
        out[i + 1] = rng::word_to_unit(words[1]);
    }
    if (i < count) {
        out[i] = rng::word_to_unit(rng::block_words(seed, stream_id, draw >> 1)[0]);
    }
}

void scalar_weibull_transform(double* data, std::size_t count, double shape, double scale) {
    const double inv_shape = 1.0 / shape;
    const bool unit = shape == 1.0;
    for (std::size_t i = 0; i < count; ++i) {
        data[i] = fastmath::weibull_from_exponential(fastmath::neg_log1m(data[i]), inv_shape, scale, unit);
    }
}

namespace {

// Branch-free order statistics of three values.
inline double select3(double a, double b, double c, std::size_t rank) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    switch (rank) {
        case 0: return std::min(lo, c);
        case 2: return std::max(hi, c);
        default: return std::max(lo, std::min(hi, c));
    }
}

}  // namespace

void scalar_combine_select(const double* lifetimes, const double* raw, std::size_t stride,
                           std::size_t count, const CombineParams& params, double* out) {
    const std::size_t n = params.n;
    const std::size_t width = n + 1;
    const double p = params.p;
    const double q = 1.0 - p;
    std::array<double, 64> y{};

    for (std::size_t i = 0; i < count; ++i) {
        const double* w = lifetimes + i * width;
        const double* flags = raw + i * stride + width;
        const double x0 = w[0];
        switch (params.model) {
            case DependencyModel::Linear:
                for (std::size_t k = 0; k < n; ++k) y[k] = q * w[k + 1] + p * x0;
                break;
            case DependencyModel::GlobalCCF: {
                const bool xi = flags[0] < p;
                for (std::size_t k = 0; k < n; ++k) y[k] = xi ? x0 : w[k + 1];
                break;
            }
            case DependencyModel::MarginalCCF:
                for (std::size_t k = 0; k < n; ++k) y[k] = flags[k] < p ? x0 : w[k + 1];
                break;
        }
        out[i] = n == 3 ? select3(y[0], y[1], y[2], params.rank)
                        : select_rank(std::span<const double>(y.data(), n), params.rank);
    }
}

}  // namespace detail

const KernelSet& scalar_kernels() {
    static const KernelSet set{Isa::Scalar, &detail::scalar_fill_uniforms, &detail::scalar_weibull_transform,
                               &detail::scalar_combine_select};
    return set;
}

}  // namespace moonlab::kernels

#pragma once

// Data-parallel inner loops of the sampler. Every entry point has a scalar
// reference implementation and, where the CPU supports it, an AVX2 variant that
// produces bit-identical output. The engine picks a variant at runtime.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "moonlab/dependency.hpp"

namespace moonlab::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Parameters of the combine/select step for one scenario.
struct CombineParams {
    DependencyModel model = DependencyModel::Linear;
    std::size_t n = 3;
    /// Rank (0-based, ascending) of the order statistic selected as T: N - M.
    std::size_t rank = 1;
    double p = 0.0;
};

struct KernelSet {
    Isa isa;

    /// out[i] = unit uniform of draw (first_draw + i) of stream (seed, stream_id).
    void (*fill_uniforms)(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t first_draw,
                          double* out, std::size_t count);

    /// In place: data[i] = scale * (-ln(1 - data[i]))^(1/shape).
    void (*weibull_transform)(double* data, std::size_t count, double shape, double scale);

    /// For each sample i: builds Y from lifetimes[i*(n+1) .. +n] (X0 first) and the
    /// Bernoulli uniforms found in raw[i*stride + n+1 ..], then writes the order
    /// statistic of rank params.rank to out[i].
    void (*combine_select)(const double* lifetimes, const double* raw, std::size_t stride,
                           std::size_t count, const CombineParams& params, double* out);
};

const KernelSet& scalar_kernels();

/// Variants compiled in and supported by the running CPU; scalar is always first.
std::vector<Isa> available_isas();

/// Throws UnsupportedError if `isa` is not available on this host.
const KernelSet& kernels_for(Isa isa);

/// Best available set, unless MOONLAB_KERNEL=scalar|avx2 forces one.
const KernelSet& active_kernels();

/// Order statistic of rank `rank` (0-based ascending) of `values`; scalar reference.
double select_rank(std::span<const double> values, std::size_t rank);

}  // namespace moonlab::kernels

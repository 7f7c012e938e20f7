#pragma once

#include "moonlab/kernels.hpp"

namespace moonlab::kernels::detail {

void scalar_fill_uniforms(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t first_draw,
                          double* out, std::size_t count);
void scalar_weibull_transform(double* data, std::size_t count, double shape, double scale);
void scalar_combine_select(const double* lifetimes, const double* raw, std::size_t stride,
                           std::size_t count, const CombineParams& params, double* out);

#if defined(MOONLAB_WITH_AVX2)
const KernelSet& avx2_kernels();
#endif

}  // namespace moonlab::kernels::detail

#include "moonlab/random.hpp"

#include <cmath>
#include <string>

#include "moonlab/errors.hpp"
#include "moonlab/fastmath.hpp"

namespace moonlab {

void validate(const DistributionSpec& dist) {
    if (!(std::isfinite(dist.shape) && dist.shape > 0.0)) {
        throw ValidationError("shape", "must be a finite positive number");
    }
    if (!(std::isfinite(dist.scale) && dist.scale > 0.0)) {
        throw ValidationError("scale", "must be a finite positive number");
    }
}

RandomStream make_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return RandomStream(seed, stream_id);
}

double sample_uniform(RandomStream& stream) {
    return rng::word_to_unit(stream.next_word());
}

double weibull_inverse_cdf(double u, const DistributionSpec& dist) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw DomainError("weibull_inverse_cdf: u must lie in [0,1), got " + std::to_string(u));
    }
    return fastmath::weibull_from_exponential(fastmath::neg_log1m(u), 1.0 / dist.shape, dist.scale,
                                              dist.shape == 1.0);
}

bool sample_bernoulli(RandomStream& stream, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("sample_bernoulli: p must lie in [0,1], got " + std::to_string(p));
    }
    return sample_uniform(stream) < p;
}

}  // namespace moonlab

#include "moonlab/dependency.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "moonlab/errors.hpp"

namespace moonlab {

std::string_view to_string(DependencyModel model) {
    switch (model) {
        case DependencyModel::Linear: return "linear";
        case DependencyModel::GlobalCCF: return "global-ccf";
        case DependencyModel::MarginalCCF: return "marginal-ccf";
    }
    return "unknown";
}

std::optional<DependencyModel> parse_model(std::string_view text) {
    if (text == "linear") return DependencyModel::Linear;
    if (text == "global-ccf") return DependencyModel::GlobalCCF;
    if (text == "marginal-ccf") return DependencyModel::MarginalCCF;
    return std::nullopt;
}

void validate(const DependencyConfig& dep) {
    if (!(dep.p >= 0.0 && dep.p <= 1.0)) {
        throw ValidationError("p", "must lie in [0, 1]");
    }
}

ComponentTTFVector linear_combine(double x0, std::span<const double> x, double p) {
    ComponentTTFVector y(x.size());
    const double q = 1.0 - p;
    for (std::size_t k = 0; k < x.size(); ++k) {
        y[k] = q * x[k] + p * x0;
    }
    return y;
}

ComponentTTFVector global_ccf_select(double x0, std::span<const double> x, bool xi) {
    if (xi) return ComponentTTFVector(x.size(), x0);
    return ComponentTTFVector(x.begin(), x.end());
}

ComponentTTFVector marginal_ccf_select(double x0, std::span<const double> x, std::span<const bool> xi) {
    if (x.size() != xi.size()) {
        throw DimensionError("marginal_ccf_select: x has " + std::to_string(x.size()) +
                             " entries but xi has " + std::to_string(xi.size()));
    }
    ComponentTTFVector y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        y[k] = xi[k] ? x0 : x[k];
    }
    return y;
}

std::size_t draws_per_sample(DependencyModel model, std::size_t n) {
    switch (model) {
        case DependencyModel::Linear: return n + 1;
        case DependencyModel::GlobalCCF: return n + 2;
        case DependencyModel::MarginalCCF: return 2 * n + 1;
    }
    return n + 1;
}

ComponentTTFVector draw_ttf_vector(const DependencyConfig& cfg, const DistributionSpec& dist,
                                   std::size_t n, RandomStream& stream) {
    if (n < 1) throw DomainError("draw_ttf_vector: n must be at least 1");
    validate(cfg);

    const double x0 = weibull_inverse_cdf(sample_uniform(stream), dist);
    std::vector<double> x(n);
    for (auto& xk : x) xk = weibull_inverse_cdf(sample_uniform(stream), dist);

    switch (cfg.model) {
        case DependencyModel::Linear:
            return linear_combine(x0, x, cfg.p);
        case DependencyModel::GlobalCCF:
            return global_ccf_select(x0, x, sample_bernoulli(stream, cfg.p));
        case DependencyModel::MarginalCCF: {
            auto xi = std::make_unique<bool[]>(n);
            for (std::size_t k = 0; k < n; ++k) xi[k] = sample_bernoulli(stream, cfg.p);
            return marginal_ccf_select(x0, x, std::span<const bool>(xi.get(), n));
        }
    }
    return x;
}

}  // namespace moonlab

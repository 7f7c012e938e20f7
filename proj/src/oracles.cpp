#include "moonlab/oracles.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "moonlab/errors.hpp"

namespace moonlab::oracle {

namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;

void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("oracle: p must lie in [0,1]");
}

void require_time(double t) {
    if (!(t >= 0.0)) throw DomainError("oracle: t must be non-negative");
}

double binomial_coefficient(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

double binomial_pmf(int m, double q, int i) {
    return binomial_coefficient(m, i) * std::pow(q, i) * std::pow(1.0 - q, m - i);
}

}  // namespace

double SurvivalFunction::operator()(double t) const {
    if (t <= 0.0) return 1.0;
    return std::exp(-std::pow(t / dist.scale, dist.shape));
}

double SurvivalFunction::cdf_inverse(double v) const {
    return dist.scale * std::pow(-std::log1p(-v), 1.0 / dist.shape);
}

double binomial_tail(int m, double q, int threshold) {
    if (threshold <= 0) return 1.0;
    if (threshold > m) return 0.0;
    double tail = 0.0;
    for (int i = threshold; i <= m; ++i) tail += binomial_pmf(m, q, i);
    return tail;
}

double indep_moon_reliability(double t, const ArchitectureSpec& arch, const SurvivalFunction& s) {
    require_time(t);
    return binomial_tail(arch.n_components, s(t), arch.m_required);
}

double indep_moon_mean_exponential(const ArchitectureSpec& arch, const DistributionSpec& dist) {
    if (dist.shape != 1.0) {
        throw UnsupportedError("closed-form MooN mean requires exponential lifetimes (shape = 1)");
    }
    double harmonic = 0.0;
    for (int i = arch.m_required; i <= arch.n_components; ++i) harmonic += 1.0 / static_cast<double>(i);
    return dist.scale * harmonic;
}

double linear_mean_prediction(double p, const ArchitectureSpec& arch, const DistributionSpec& dist) {
    require_probability(p);
    return (1.0 - p) * indep_moon_mean_exponential(arch, dist) + p * dist.scale;
}

double global_ccf_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s) {
    require_probability(p);
    require_time(t);
    if (t == 0.0) return 1.0;
    return (1.0 - p) * indep_moon_reliability(t, arch, s) + p * s(t);
}

double marginal_ccf_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s) {
    require_probability(p);
    require_time(t);
    if (t == 0.0) return 1.0;
    const int n = arch.n_components;
    const int m = arch.m_required;
    const double st = s(t);
    double r = 0.0;
    for (int tied = 0; tied <= n; ++tied) {
        const double weight = binomial_pmf(n, p, tied);
        if (weight == 0.0) continue;
        const int free = n - tied;
        r += weight * (st * binomial_tail(free, st, m - tied) + (1.0 - st) * binomial_tail(free, st, m));
    }
    return r;
}

double linear_model_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s) {
    require_probability(p);
    require_time(t);
    if (p == 0.0) return indep_moon_reliability(t, arch, s);
    if (p == 1.0) return s(t);
    if (t == 0.0) return 1.0;

    // X0 beyond t/p keeps every component alive past t. Below it, integrate over the
    // cumulative hazard y = (x0/scale)^shape of X0, whose density e^-y stays bounded for any shape.
    const double x0_limit = t / p;
    const double tail = s(x0_limit);
    const double y_limit = std::pow(x0_limit / s.dist.scale, s.dist.shape);
    auto conditional = [&](double y) {
        const double x0 = s.dist.scale * std::pow(y, 1.0 / s.dist.shape);
        const double sc = x0 < x0_limit ? s((t - p * x0) / (1.0 - p)) : 1.0;
        return std::exp(-y) * binomial_tail(arch.n_components, sc, arch.m_required);
    };
    double error = 0.0;
    // The conditional survival has an unbounded derivative at y_limit when shape < 1.
    thread_local boost::math::quadrature::tanh_sinh<double> endpoint_safe;
    const double body = endpoint_safe.integrate(conditional, 0.0, y_limit, 1e-12, &error);
    const double r = tail + body;
    if (!(error <= std::max(1e-6 * r, 1e-14))) {
        throw QuadratureError("linear_model_reliability: error estimate " + std::to_string(error) + " at t=" +
                              std::to_string(t) + ", p=" + std::to_string(p) + " exceeds tolerance");
    }
    return r;
}

double model_reliability(DependencyModel model, double t, double p, const ArchitectureSpec& arch,
                         const SurvivalFunction& s) {
    switch (model) {
        case DependencyModel::Linear: return linear_model_reliability(t, p, arch, s);
        case DependencyModel::GlobalCCF: return global_ccf_reliability(t, p, arch, s);
        case DependencyModel::MarginalCCF: return marginal_ccf_reliability(t, p, arch, s);
    }
    return 0.0;
}

double oracle_mean(const std::function<double(double)>& reliability, const MeanOptions& options) {
    double cutoff = 1.0;
    int doublings = 0;
    while (reliability(cutoff) >= options.tail_threshold) {
        cutoff *= 2.0;
        if (++doublings > 64) throw QuadratureError("oracle_mean: reliability does not decay");
    }
    double error = 0.0;
    const double mean = Quadrature::integrate(reliability, 0.0, cutoff, 25, 1e-11, &error);
    if (!(error <= options.abs_tolerance)) {
        throw QuadratureError("oracle_mean: error estimate " + std::to_string(error) + " over [0, " +
                              std::to_string(cutoff) + "] exceeds " + std::to_string(options.abs_tolerance));
    }
    return mean;
}

double model_mean(DependencyModel model, double p, const ArchitectureSpec& arch, const DistributionSpec& dist) {
    const SurvivalFunction s{dist};
    return oracle_mean([&](double t) { return model_reliability(model, t, p, arch, s); });
}

}  // namespace moonlab::oracle

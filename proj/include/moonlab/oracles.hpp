#pragma once

#include <functional>

#include "moonlab/dependency.hpp"
#include "moonlab/engine.hpp"
#include "moonlab/random.hpp"

namespace moonlab::oracle {

/// Weibull survival S(t) = exp(-(t/scale)^shape).
struct SurvivalFunction {
    DistributionSpec dist;

    double operator()(double t) const;
    /// Inverse of the CDF F = 1 - S.
    double cdf_inverse(double v) const;
};

/// P(Binomial(m, q) >= threshold); 1 when threshold <= 0, 0 when threshold > m.
double binomial_tail(int m, double q, int threshold);

/// Sum_{i=M}^{N} C(N,i) S^i (1-S)^(N-i).
double indep_moon_reliability(double t, const ArchitectureSpec& arch, const SurvivalFunction& s);

/// scale * Sum_{i=M}^{N} 1/i. Throws UnsupportedError unless shape == 1.
double indep_moon_mean_exponential(const ArchitectureSpec& arch, const DistributionSpec& dist);

/// (1-p) E[order statistic of X] + p E[X0]; exact for the Linear and GlobalCCF models.
/// Throws UnsupportedError unless shape == 1.
double linear_mean_prediction(double p, const ArchitectureSpec& arch, const DistributionSpec& dist);

/// (1-p) R_indep(t) + p S(t).
double global_ccf_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s);

/// Exact binomial conditioning on the number j of components tied to X0.
double marginal_ccf_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s);

/// Quadrature over X0 of the conditional independent-MooN reliability.
/// Throws QuadratureError if the relative error estimate exceeds 1e-6.
double linear_model_reliability(double t, double p, const ArchitectureSpec& arch, const SurvivalFunction& s);

/// Reliability R(t) of T for the given model.
double model_reliability(DependencyModel model, double t, double p, const ArchitectureSpec& arch,
                         const SurvivalFunction& s);

struct MeanOptions {
    /// Integration stops where R drops below this.
    double tail_threshold = 1e-10;
    double abs_tolerance = 1e-5;
};

/// E[T] = integral of R over [0, inf). Throws QuadratureError on non-convergence.
double oracle_mean(const std::function<double(double)>& reliability, const MeanOptions& options = {});

/// oracle_mean of model_reliability.
double model_mean(DependencyModel model, double p, const ArchitectureSpec& arch, const DistributionSpec& dist);

}  // namespace moonlab::oracle

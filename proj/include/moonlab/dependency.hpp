#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "moonlab/random.hpp"

namespace moonlab {

/// How the covariate X0 couples the component lifetimes.
enum class DependencyModel {
    Linear,       ///< Y_k = (1-p) X_k + p X0
    GlobalCCF,    ///< one Bernoulli(p) switch ties every component to X0
    MarginalCCF,  ///< an independent Bernoulli(p) switch per component
};

std::string_view to_string(DependencyModel model);
/// Accepts the CLI spellings "linear", "global-ccf", "marginal-ccf".
std::optional<DependencyModel> parse_model(std::string_view text);

struct DependencyConfig {
    DependencyModel model = DependencyModel::Linear;
    double p = 0.0;
};

/// Throws ValidationError (field "p") unless 0 <= p <= 1.
void validate(const DependencyConfig& dep);

/// Dependent component lifetimes Y_1..Y_N.
using ComponentTTFVector = std::vector<double>;

ComponentTTFVector linear_combine(double x0, std::span<const double> x, double p);
ComponentTTFVector global_ccf_select(double x0, std::span<const double> x, bool xi);
/// Throws DimensionError if x and xi differ in length.
ComponentTTFVector marginal_ccf_select(double x0, std::span<const double> x, std::span<const bool> xi);

/// Uniform draws consumed per system sample: n+1 (Linear), n+2 (GlobalCCF), 2n+1 (MarginalCCF).
///
/// Draw order within one sample: X0, X1..Xn, then the Bernoulli uniforms
/// (one for GlobalCCF, xi_1..xi_n for MarginalCCF). The budget is fixed
/// regardless of the Bernoulli outcomes.
std::size_t draws_per_sample(DependencyModel model, std::size_t n);

/// Draws X0..Xn and the switches from `stream` and applies the model transform.
ComponentTTFVector draw_ttf_vector(const DependencyConfig& cfg, const DistributionSpec& dist,
                                   std::size_t n, RandomStream& stream);

}  // namespace moonlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "moonlab/dependency.hpp"
#include "moonlab/kernels.hpp"
#include "moonlab/random.hpp"

namespace moonlab {

/// N redundant components, operational while at least M work.
struct ArchitectureSpec {
    int n_components = 3;
    int m_required = 2;

    bool operator==(const ArchitectureSpec&) const = default;
};

/// Throws ValidationError (field "n" or "m") unless 1 <= M <= N <= kMaxComponents.
void validate(const ArchitectureSpec& arch);

inline constexpr int kMaxComponents = 64;

/// One simulation cell.
struct ScenarioConfig {
    ArchitectureSpec arch;
    DependencyConfig dep;
    DistributionSpec dist;
    std::uint64_t nb = 1'000'000;
    std::uint64_t seed = 0;
};

void validate(const ScenarioConfig& cfg);

/// Samples per RandomStream; sample i is drawn from stream i / kSamplesPerStream.
inline constexpr std::uint64_t kSamplesPerStream = 1u << 16;

struct EngineOptions {
    /// Worker threads; 0 resolves through MOONLAB_THREADS, then the hardware.
    unsigned threads = 0;
    /// simulate_batch refuses to materialize more samples than this.
    std::uint64_t max_materialized = std::uint64_t{1} << 27;
    /// Kernel set; nullptr selects kernels::active_kernels().
    const kernels::KernelSet* kernels = nullptr;
    /// Test hook: selects rank M-1 instead of N-M (swaps the meaning of M).
    bool invert_m_canary = false;
};

/// Realizations of the system time to failure T for one cell.
struct TTFSample {
    std::vector<double> values;
    ScenarioConfig scenario;
};

/// (N-M+1)-th smallest element of y. Throws DimensionError if y.size() != N.
double system_ttf(std::span<const double> y, const ArchitectureSpec& arch);

/// values[i] depends only on (scenario, i), never on the thread count or kernel set.
/// Throws ResourceLimitError if nb exceeds options.max_materialized.
TTFSample simulate_batch(const ScenarioConfig& cfg, const EngineOptions& options = {});

/// Generates samples [first, first + out.size()) of the cell into `out`.
void simulate_range(const ScenarioConfig& cfg, std::uint64_t first, std::span<double> out,
                    const EngineOptions& options = {});

/// Per-sample reference path: draw_ttf_vector + system_ttf on a RandomStream.
/// Slow; used to cross-check the kernels.
double reference_sample(const ScenarioConfig& cfg, std::uint64_t index);

}  // namespace moonlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "moonlab/engine.hpp"
#include "moonlab/estimators.hpp"

namespace moonlab {

struct AnalysisOptions {
    std::size_t kde_grid = kDefaultKdeGrid;
    /// Reservoir size used for median, mode and KDE when the cell is streamed.
    std::size_t reservoir = std::size_t{1} << 22;
};

/// Statistics and curves of one simulated cell. Reliability and hazard share the KDE grid.
struct CellAnalysis {
    SummaryStats stats;
    DensityEstimate density;
    ReliabilityCurve reliability;
    HazardCurve hazard;
    /// True when nb exceeded the materialization cap and the streaming path was used.
    bool streamed = false;
};

CellAnalysis analyze_sample(const TTFSample& sample, const AnalysisOptions& options = {},
                            unsigned threads = 1);

/// Materializes the sample when nb <= engine.max_materialized; otherwise makes two
/// regeneration passes: exact moments and survival counts over all nb samples,
/// median/mode/KDE from a strided subsample of at most options.reservoir values.
CellAnalysis analyze_cell(const ScenarioConfig& cfg, const AnalysisOptions& options = {},
                          const EngineOptions& engine = {});

/// `count` equally spaced values from 0 to 1 inclusive.
std::vector<double> default_p_grid(std::size_t count = 20);

struct SweepConfig {
    /// base.dep.p is ignored.
    ScenarioConfig base;
    std::vector<double> p_grid = default_p_grid();
    AnalysisOptions analysis;
};

/// Throws ValidationError (field "p_grid") unless nonempty, strictly increasing, within [0,1].
void validate(const SweepConfig& cfg);

struct SweepPoint {
    double p = 0.0;
    CellAnalysis cell;
};

struct SweepResult {
    ScenarioConfig base;
    std::vector<SweepPoint> points;
    /// p = 0 cell; taken from points when 0 is on the grid.
    SummaryStats baseline;
    RelativeCurves relative;
};

/// Every cell uses base.seed, so cells share random numbers across p.
SweepResult sweep(const SweepConfig& cfg, const EngineOptions& engine = {});

RelativeCurves relative_stats(const SweepResult& result);

}  // namespace moonlab

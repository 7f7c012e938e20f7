#pragma once

// CSV and JSON renderings shared by the CLI and the HTTP service.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "moonlab/engine.hpp"
#include "moonlab/oracles.hpp"
#include "moonlab/sweep.hpp"

namespace moonlab::report {

using Json = nlohmann::json;

/// Shortest decimal that parses back to the same double; "" for NaN.
std::string format_double(double value);

/// %.15g rendering used for oracle output.
std::string format_significant(double value, int digits = 15);

inline constexpr std::string_view kSweepCsvHeader =
    "model,n,m,shape,scale,samples,seed,p,mean,mean_stderr,median,mode,std_dev,skewness,kurtosis_excess,"
    "rel_mean,rel_median,rel_mode,rel_std_dev";

/// Header row plus one row per grid point, LF line endings.
std::string sweep_csv(const SweepResult& result);

/// t,density,survival,hazard table for one cell; hazard empty where undefined.
std::string curves_csv(const CellAnalysis& cell);

/// Splits CSV text (no quoting) into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Evenly strided subset of indices [0, size) with at most max_points entries, always keeping the last.
std::vector<std::size_t> decimation_indices(std::size_t size, std::size_t max_points);

Json scenario_json(const ScenarioConfig& cfg);
Json stats_json(const SummaryStats& stats);
Json density_json(const DensityEstimate& density, std::size_t max_points = 0);
Json reliability_json(const ReliabilityCurve& reliability, std::size_t max_points = 0);
Json hazard_json(const HazardCurve& hazard, std::size_t max_points = 0);
Json relative_json(const RelativeCurves& relative);

/// Resolved settings echoed into output metadata.
struct RunInfo {
    std::string command;
    unsigned threads = 1;
    std::string kernel;
    std::size_t kde_grid = kDefaultKdeGrid;
};

/// {tool, version, command, timestamp, threads, kernel, config}
Json metadata_json(const RunInfo& info, const Json& config);

/// Top-level keys metadata, stats, density, reliability, hazard.
Json simulate_document(const ScenarioConfig& cfg, const CellAnalysis& cell, const RunInfo& info);

Json sweep_document(const SweepConfig& cfg, const SweepResult& result, const RunInfo& info);

/// The same document without metadata.timestamp; used for reproducibility checks.
Json payload_without_timestamp(Json document);

struct OracleQuery {
    DependencyModel model = DependencyModel::Linear;
    ArchitectureSpec arch;
    DistributionSpec dist;
    double p = 0.0;
    std::optional<double> t;
    bool mean = false;
    /// Allow the quadrature route for the Linear-model mean when shape != 1.
    bool quadrature = false;
};

struct OracleAnswer {
    std::string quantity;  ///< "reliability" or "mean"
    double value = 0.0;
    std::string method;  ///< "closed-form", "binomial-conditioning" or "quadrature"
};

/// Throws ValidationError for inconsistent queries, UnsupportedError for the
/// Linear-model mean with shape != 1 unless quadrature is set.
OracleAnswer evaluate_oracle(const OracleQuery& query);

/// JSON text with the value printed to 15 significant digits.
std::string oracle_json_text(const OracleQuery& query, const OracleAnswer& answer);

}  // namespace moonlab::report

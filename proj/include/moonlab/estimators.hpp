#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace moonlab {

/// Location, spread and shape statistics of a sample of T.
/// Undefined values (zero variance) are NaN.
struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    double mean_std_error = 0.0;
    /// Large-sample standard error of std_dev, sd * sqrt((kurtosis_excess + 2) / (4n)).
    double std_dev_std_error = 0.0;
    std::uint64_t sample_count = 0;
    bool higher_moments_defined = true;
};

/// Central moments accumulated in fixed 2^16-element chunks, combined in chunk
/// order, so the result is independent of how chunks are scheduled.
struct MomentSummary {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  ///< population central moments
    double m3 = 0.0;
    double m4 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline constexpr std::size_t kMomentChunk = std::size_t{1} << 16;

MomentSummary compute_moments(std::span<const double> values, unsigned threads = 1);

/// Per-chunk partial sums, exposed so streaming code can reproduce compute_moments exactly.
struct RawChunkSums {
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};
struct CentralChunkSums {
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};
RawChunkSums raw_chunk_sums(std::span<const double> chunk);
CentralChunkSums central_chunk_sums(std::span<const double> chunk, double mean);
MomentSummary combine_moments(std::span<const RawChunkSums> raw, std::span<const CentralChunkSums> central);

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

struct ReliabilityCurve {
    std::vector<double> t_grid;
    std::vector<double> survival;
};

/// Hazard rate on a grid; rate is NaN where survival is below the guard.
struct HazardCurve {
    std::vector<double> grid;
    std::vector<double> rate;
};

inline constexpr std::size_t kDefaultKdeGrid = 512;

/// Sample quantile, linear interpolation between order statistics (R type 7).
double quantile(std::span<const double> values, double prob);

/// quantile() for a sample already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Midpoint of the two central order statistics for even sizes.
double median(std::span<const double> values);
double median_sorted(std::span<const double> sorted);

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5); falls back to sd when IQR is 0.
/// Throws SampleError for fewer than 2 values or when sd and IQR are both 0.
double silverman_bandwidth(std::span<const double> values);
double silverman_rule(double std_dev, double iqr, std::size_t n);

/// Linear-binned Gaussian KDE on a uniform grid over [max(0, min-3h), max+3h].
DensityEstimate gaussian_kde(std::span<const double> values, std::size_t grid_points = kDefaultKdeGrid,
                             std::optional<double> bandwidth = std::nullopt);

/// Grid argmax of the density; the first (smallest t) maximum wins.
double mode_of(const DensityEstimate& density);

double mode_estimate(std::span<const double> values, std::size_t grid_points = kDefaultKdeGrid);

/// survival(t) = #{values > t} / n. Throws DomainError unless t_grid is non-decreasing.
ReliabilityCurve empirical_reliability(std::span<const double> values, std::span<const double> t_grid);

/// As above, for a sample already sorted ascending.
ReliabilityCurve empirical_reliability_sorted(std::span<const double> sorted, std::span<const double> t_grid);

inline constexpr double kHazardMinSurvival = 0.01;

/// density / survival pointwise. Throws DimensionError if the grids differ.
HazardCurve hazard_estimate(const DensityEstimate& density, const ReliabilityCurve& reliability,
                            double min_survival = kHazardMinSurvival);

struct SummaryOptions {
    std::size_t kde_grid = kDefaultKdeGrid;
    unsigned threads = 1;
};

/// Throws SampleError for fewer than 2 values.
SummaryStats summary_stats(std::span<const double> values, const SummaryOptions& options = {});

/// Builds SummaryStats from precomputed pieces (used by the streaming path).
SummaryStats assemble_stats(const MomentSummary& moments, double median_value, double mode_value);

/// x(p) / x(baseline) for mean, median, mode and std_dev. NaN where the baseline is 0.
struct RelativeCurves {
    std::vector<double> p;
    std::vector<double> mean;
    std::vector<double> median;
    std::vector<double> mode;
    std::vector<double> std_dev;
};

RelativeCurves relative_to_baseline(std::span<const double> p, std::span<const SummaryStats> stats,
                                    const SummaryStats& baseline);

}  // namespace moonlab

#include "moonlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "moonlab/errors.hpp"
#include "moonlab/parallel.hpp"

namespace moonlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t chunk_count(std::size_t n) { return (n + kMomentChunk - 1) / kMomentChunk; }

}  // namespace

RawChunkSums raw_chunk_sums(std::span<const double> chunk) {
    RawChunkSums out;
    out.count = chunk.size();
    if (chunk.empty()) return out;
    out.min = chunk[0];
    out.max = chunk[0];
    for (const double x : chunk) {
        out.sum += x;
        out.min = std::min(out.min, x);
        out.max = std::max(out.max, x);
    }
    return out;
}

CentralChunkSums central_chunk_sums(std::span<const double> chunk, double mean) {
    CentralChunkSums out;
    for (const double x : chunk) {
        const double d = x - mean;
        const double d2 = d * d;
        out.c2 += d2;
        out.c3 += d2 * d;
        out.c4 += d2 * d2;
    }
    return out;
}

MomentSummary combine_moments(std::span<const RawChunkSums> raw, std::span<const CentralChunkSums> central) {
    MomentSummary m;
    double sum = 0.0;
    bool first = true;
    for (const auto& r : raw) {
        if (r.count == 0) continue;
        m.count += r.count;
        sum += r.sum;
        m.min = first ? r.min : std::min(m.min, r.min);
        m.max = first ? r.max : std::max(m.max, r.max);
        first = false;
    }
    if (m.count == 0) return m;
    const auto n = static_cast<double>(m.count);
    m.mean = sum / n;
    double c2 = 0.0, c3 = 0.0, c4 = 0.0;
    for (const auto& c : central) {
        c2 += c.c2;
        c3 += c.c3;
        c4 += c.c4;
    }
    m.m2 = c2 / n;
    m.m3 = c3 / n;
    m.m4 = c4 / n;
    return m;
}

MomentSummary compute_moments(std::span<const double> values, unsigned threads) {
    const std::size_t chunks = chunk_count(values.size());
    std::vector<RawChunkSums> raw(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        raw[c] = raw_chunk_sums(values.subspan(c * kMomentChunk, std::min(kMomentChunk, values.size() - c * kMomentChunk)));
    });
    std::vector<CentralChunkSums> central;
    const double mean = combine_moments(raw, central).mean;
    central.resize(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        central[c] = central_chunk_sums(
            values.subspan(c * kMomentChunk, std::min(kMomentChunk, values.size() - c * kMomentChunk)), mean);
    });
    return combine_moments(raw, central);
}

double quantile(std::span<const double> values, double prob) {
    if (values.empty()) throw SampleError("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: probability must lie in [0,1]");
    std::vector<double> copy(values.begin(), values.end());
    const double h = static_cast<double>(copy.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(lo), copy.end());
    const double a = copy[lo];
    if (lo + 1 >= copy.size()) return a;
    const double b = *std::min_element(copy.begin() + static_cast<std::ptrdiff_t>(lo + 1), copy.end());
    return a + (h - static_cast<double>(lo)) * (b - a);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw SampleError("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile: probability must lie in [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted[lo];
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double median_sorted(std::span<const double> sorted) {
    if (sorted.empty()) throw SampleError("median of an empty sample");
    const std::size_t half = sorted.size() / 2;
    if (sorted.size() % 2 == 1) return sorted[half];
    return (sorted[half - 1] + sorted[half]) * 0.5;
}

double median(std::span<const double> values) {
    if (values.empty()) throw SampleError("median of an empty sample");
    std::vector<double> copy(values.begin(), values.end());
    const std::size_t half = copy.size() / 2;
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(half), copy.end());
    const double upper = copy[half];
    if (copy.size() % 2 == 1) return upper;
    const double lower = *std::max_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(half));
    return (lower + upper) * 0.5;
}

double silverman_bandwidth(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw SampleError("bandwidth selection needs at least 2 values");
    const MomentSummary m = compute_moments(values);
    const double sd = std::sqrt(m.m2 * static_cast<double>(n) / static_cast<double>(n - 1));
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    return silverman_rule(sd, iqr, n);
}

double silverman_rule(double std_dev, double iqr, std::size_t n) {
    const double spread = iqr > 0.0 ? std::min(std_dev, iqr / 1.34) : std_dev;
    if (!(spread > 0.0)) throw SampleError("degenerate sample: standard deviation and IQR are both zero");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityEstimate gaussian_kde(std::span<const double> values, std::size_t grid_points, std::optional<double> bandwidth) {
    if (values.empty()) throw SampleError("density estimate of an empty sample");
    if (grid_points < 2) throw DomainError("gaussian_kde: need at least 2 grid points");
    double h = 0.0;
    if (bandwidth) {
        h = *bandwidth;
        if (!(std::isfinite(h) && h > 0.0)) throw DomainError("gaussian_kde: bandwidth must be positive");
    } else {
        h = silverman_bandwidth(values);
    }

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *min_it >= 0.0 ? std::max(0.0, *min_it - 3.0 * h) : *min_it - 3.0 * h;
    const double hi = *max_it + 3.0 * h;
    const std::size_t g = grid_points;
    const double step = (hi - lo) / static_cast<double>(g - 1);

    DensityEstimate out;
    out.bandwidth = h;
    out.grid.resize(g);
    for (std::size_t j = 0; j < g; ++j) out.grid[j] = lo + static_cast<double>(j) * step;

    std::vector<double> weights(g, 0.0);
    for (const double x : values) {
        const double pos = (x - lo) / step;
        if (pos <= 0.0) {
            weights[0] += 1.0;
            continue;
        }
        const auto j = static_cast<std::size_t>(pos);
        if (j >= g - 1) {
            weights[g - 1] += 1.0;
            continue;
        }
        const double frac = pos - static_cast<double>(j);
        weights[j] += 1.0 - frac;
        weights[j + 1] += frac;
    }

    const std::size_t reach = std::min<std::size_t>(g - 1, static_cast<std::size_t>(std::ceil(5.0 * h / step)));
    std::vector<double> kernel(reach + 1);
    const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t d = 0; d <= reach; ++d) {
        const double z = static_cast<double>(d) * step / h;
        kernel[d] = norm * std::exp(-0.5 * z * z);
    }

    const double inv_n = 1.0 / static_cast<double>(values.size());
    out.density.assign(g, 0.0);
    for (std::size_t i = 0; i < g; ++i) {
        const std::size_t from = i > reach ? i - reach : 0;
        const std::size_t to = std::min(g - 1, i + reach);
        double acc = 0.0;
        for (std::size_t j = from; j <= to; ++j) {
            acc += weights[j] * kernel[j > i ? j - i : i - j];
        }
        out.density[i] = acc * inv_n;
    }
    return out;
}

double mode_of(const DensityEstimate& density) {
    if (density.density.empty()) throw SampleError("mode of an empty density estimate");
    const auto it = std::max_element(density.density.begin(), density.density.end());
    return density.grid[static_cast<std::size_t>(it - density.density.begin())];
}

double mode_estimate(std::span<const double> values, std::size_t grid_points) {
    return mode_of(gaussian_kde(values, grid_points));
}

ReliabilityCurve empirical_reliability_sorted(std::span<const double> sorted, std::span<const double> t_grid) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw DomainError("empirical_reliability: t_grid must be non-decreasing");
    }
    ReliabilityCurve out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.survival.resize(t_grid.size());
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const auto at_most = std::upper_bound(sorted.begin(), sorted.end(), t_grid[i]) - sorted.begin();
        out.survival[i] = sorted.empty() ? 0.0 : static_cast<double>(sorted.size() - static_cast<std::size_t>(at_most)) / n;
    }
    return out;
}

ReliabilityCurve empirical_reliability(std::span<const double> values, std::span<const double> t_grid) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return empirical_reliability_sorted(sorted, t_grid);
}

HazardCurve hazard_estimate(const DensityEstimate& density, const ReliabilityCurve& reliability, double min_survival) {
    if (density.grid != reliability.t_grid) {
        throw DimensionError("hazard_estimate: density and reliability must share one grid");
    }
    HazardCurve out;
    out.grid = density.grid;
    out.rate.resize(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double s = reliability.survival[i];
        out.rate[i] = s >= min_survival ? density.density[i] / s : kNaN;
    }
    return out;
}

SummaryStats assemble_stats(const MomentSummary& m, double median_value, double mode_value) {
    SummaryStats s;
    const auto n = static_cast<double>(m.count);
    s.sample_count = m.count;
    s.mean = m.mean;
    s.median = median_value;
    s.mode = mode_value;
    s.std_dev = m.count > 1 ? std::sqrt(m.m2 * n / (n - 1.0)) : 0.0;
    s.mean_std_error = s.std_dev / std::sqrt(n);
    if (m.m2 > 0.0) {
        s.skewness = m.m3 / std::pow(m.m2, 1.5);
        s.kurtosis_excess = m.m4 / (m.m2 * m.m2) - 3.0;
        s.std_dev_std_error = s.std_dev * std::sqrt(std::max(0.0, s.kurtosis_excess + 2.0) / (4.0 * n));
        s.higher_moments_defined = true;
    } else {
        s.skewness = kNaN;
        s.kurtosis_excess = kNaN;
        s.std_dev_std_error = 0.0;
        s.higher_moments_defined = false;
    }
    return s;
}

SummaryStats summary_stats(std::span<const double> values, const SummaryOptions& options) {
    if (values.size() < 2) {
        throw SampleError("summary statistics need at least 2 values, got " + std::to_string(values.size()));
    }
    const MomentSummary m = compute_moments(values, options.threads);
    const double med = median(values);
    const double mode = m.m2 > 0.0 ? mode_estimate(values, options.kde_grid) : values[0];
    return assemble_stats(m, med, mode);
}

RelativeCurves relative_to_baseline(std::span<const double> p, std::span<const SummaryStats> stats,
                                    const SummaryStats& baseline) {
    if (p.size() != stats.size()) throw DimensionError("relative_to_baseline: p and stats differ in length");
    auto ratio = [](double x, double base) { return base == 0.0 ? kNaN : x / base; };
    RelativeCurves out;
    out.p.assign(p.begin(), p.end());
    for (const auto& s : stats) {
        out.mean.push_back(ratio(s.mean, baseline.mean));
        out.median.push_back(ratio(s.median, baseline.median));
        out.mode.push_back(ratio(s.mode, baseline.mode));
        out.std_dev.push_back(ratio(s.std_dev, baseline.std_dev));
    }
    return out;
}

}  // namespace moonlab

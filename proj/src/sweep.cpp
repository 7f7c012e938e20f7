#include "moonlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "moonlab/errors.hpp"
#include "moonlab/parallel.hpp"

namespace moonlab {

namespace {

// Reliability shares the density grid so the hazard can be formed pointwise.
CellAnalysis analyze_values(std::span<const double> values, const MomentSummary& moments,
                            const AnalysisOptions& options) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    CellAnalysis cell;
    const double sd = std::sqrt(moments.m2 * static_cast<double>(sorted.size()) / static_cast<double>(sorted.size() - 1));
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    cell.density = gaussian_kde(sorted, options.kde_grid, silverman_rule(sd, iqr, sorted.size()));
    cell.reliability = empirical_reliability_sorted(sorted, cell.density.grid);
    cell.hazard = hazard_estimate(cell.density, cell.reliability);
    cell.stats = assemble_stats(moments, median_sorted(sorted), mode_of(cell.density));
    return cell;
}

CellAnalysis analyze_streaming(const ScenarioConfig& cfg, const AnalysisOptions& options, const EngineOptions& engine) {
    const unsigned threads = resolve_threads(engine.threads);
    const std::uint64_t nb = cfg.nb;
    const std::uint64_t chunks = (nb + kSamplesPerStream - 1) / kSamplesPerStream;
    constexpr std::uint64_t kChunksPerTask = 64;
    const std::uint64_t tasks = (chunks + kChunksPerTask - 1) / kChunksPerTask;

    const std::uint64_t reservoir_size = std::max<std::uint64_t>(2, options.reservoir);
    const std::uint64_t stride = (nb + reservoir_size - 1) / reservoir_size;
    std::vector<double> reservoir((nb + stride - 1) / stride);

    // Visits every chunk of the cell, regenerating its samples.
    auto for_each_chunk = [&](auto&& visit) {
        parallel_for(tasks, threads, [&](std::size_t task) {
            std::vector<double> buffer(kSamplesPerStream);
            const std::uint64_t first_chunk = task * kChunksPerTask;
            const std::uint64_t last_chunk = std::min(chunks, first_chunk + kChunksPerTask);
            for (std::uint64_t c = first_chunk; c < last_chunk; ++c) {
                const std::uint64_t begin = c * kSamplesPerStream;
                const auto len = static_cast<std::size_t>(std::min(kSamplesPerStream, nb - begin));
                std::span<double> values(buffer.data(), len);
                simulate_range(cfg, begin, values, engine);
                visit(task, c, begin, std::span<const double>(values));
            }
        });
    };

    std::vector<RawChunkSums> raw(chunks);
    for_each_chunk([&](std::size_t, std::uint64_t c, std::uint64_t begin, std::span<const double> values) {
        raw[c] = raw_chunk_sums(values);
        for (std::uint64_t i = (begin + stride - 1) / stride * stride; i < begin + values.size(); i += stride) {
            reservoir[i / stride] = values[i - begin];
        }
    });
    const double mean = combine_moments(raw, {}).mean;

    std::vector<double> sorted_reservoir = reservoir;
    std::sort(sorted_reservoir.begin(), sorted_reservoir.end());
    const MomentSummary reservoir_moments = compute_moments(sorted_reservoir);
    const double reservoir_sd =
        std::sqrt(reservoir_moments.m2 * static_cast<double>(sorted_reservoir.size()) /
                  static_cast<double>(sorted_reservoir.size() - 1));
    const double iqr = quantile_sorted(sorted_reservoir, 0.75) - quantile_sorted(sorted_reservoir, 0.25);

    CellAnalysis cell;
    cell.streamed = true;
    cell.density = gaussian_kde(sorted_reservoir, options.kde_grid,
                                silverman_rule(reservoir_sd, iqr, sorted_reservoir.size()));
    const std::vector<double>& grid = cell.density.grid;

    // counts[task][k]: samples with exactly k grid points strictly below them.
    std::vector<CentralChunkSums> central(chunks);
    std::vector<std::vector<std::uint64_t>> counts(tasks, std::vector<std::uint64_t>(grid.size() + 1, 0));
    for_each_chunk([&](std::size_t task, std::uint64_t c, std::uint64_t, std::span<const double> values) {
        central[c] = central_chunk_sums(values, mean);
        auto& hist = counts[task];
        for (const double x : values) {
            ++hist[static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), x) - grid.begin())];
        }
    });

    std::vector<std::uint64_t> total(grid.size() + 1, 0);
    for (const auto& hist : counts) {
        for (std::size_t k = 0; k < hist.size(); ++k) total[k] += hist[k];
    }
    cell.reliability.t_grid = grid;
    cell.reliability.survival.resize(grid.size());
    std::uint64_t above = 0;  // samples x > grid[j]
    for (std::size_t j = grid.size(); j-- > 0;) {
        above += total[j + 1];
        cell.reliability.survival[j] = static_cast<double>(above) / static_cast<double>(nb);
    }
    cell.hazard = hazard_estimate(cell.density, cell.reliability);
    cell.stats = assemble_stats(combine_moments(raw, central), median_sorted(sorted_reservoir), mode_of(cell.density));
    return cell;
}

}  // namespace

CellAnalysis analyze_sample(const TTFSample& sample, const AnalysisOptions& options, unsigned threads) {
    if (sample.values.size() < 2) {
        throw SampleError("cell analysis needs at least 2 samples, got " + std::to_string(sample.values.size()));
    }
    return analyze_values(sample.values, compute_moments(sample.values, threads), options);
}

CellAnalysis analyze_cell(const ScenarioConfig& cfg, const AnalysisOptions& options, const EngineOptions& engine) {
    validate(cfg);
    if (cfg.nb < 2) throw ValidationError("samples", "must be at least 2 for statistics");
    if (cfg.nb <= engine.max_materialized) {
        const TTFSample sample = simulate_batch(cfg, engine);
        return analyze_sample(sample, options, resolve_threads(engine.threads));
    }
    return analyze_streaming(cfg, options, engine);
}

std::vector<double> default_p_grid(std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {0.0};
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = static_cast<double>(k) / static_cast<double>(count - 1);
    }
    return grid;
}

void validate(const SweepConfig& cfg) {
    if (cfg.p_grid.empty()) throw ValidationError("p_grid", "must not be empty");
    for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) {
        const double p = cfg.p_grid[i];
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p_grid", "values must lie in [0, 1]");
        if (i > 0 && !(p > cfg.p_grid[i - 1])) throw ValidationError("p_grid", "values must be strictly increasing");
    }
    ScenarioConfig probe = cfg.base;
    probe.dep.p = cfg.p_grid.front();
    validate(probe);
}

SweepResult sweep(const SweepConfig& cfg, const EngineOptions& engine) {
    validate(cfg);
    SweepResult result;
    result.base = cfg.base;
    result.base.dep.p = 0.0;

    for (const double p : cfg.p_grid) {
        ScenarioConfig cell = cfg.base;
        cell.dep.p = p;
        result.points.push_back({p, analyze_cell(cell, cfg.analysis, engine)});
    }
    if (cfg.p_grid.front() == 0.0) {
        result.baseline = result.points.front().cell.stats;
    } else {
        result.baseline = analyze_cell(result.base, cfg.analysis, engine).stats;
    }
    result.relative = relative_stats(result);
    return result;
}

RelativeCurves relative_stats(const SweepResult& result) {
    std::vector<double> p;
    std::vector<SummaryStats> stats;
    for (const auto& point : result.points) {
        p.push_back(point.p);
        stats.push_back(point.cell.stats);
    }
    return relative_to_baseline(p, stats, result.baseline);
}

}  // namespace moonlab

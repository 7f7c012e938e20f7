#include "moonlab/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "moonlab/errors.hpp"
#include "moonlab/version.hpp"

namespace moonlab::report {

std::string format_double(double value) {
    if (std::isnan(value)) return "";
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

std::string format_significant(double value, int digits) {
    if (!std::isfinite(value)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out(kSweepCsvHeader);
    out += '\n';
    const ScenarioConfig& base = result.base;
    const std::string prefix = std::string(to_string(base.dep.model)) + ',' + std::to_string(base.arch.n_components) +
                               ',' + std::to_string(base.arch.m_required) + ',' + format_double(base.dist.shape) +
                               ',' + format_double(base.dist.scale) + ',' + std::to_string(base.nb) + ',' +
                               std::to_string(base.seed) + ',';
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& point = result.points[i];
        const SummaryStats& s = point.cell.stats;
        const double fields[] = {point.p,
                                 s.mean,
                                 s.mean_std_error,
                                 s.median,
                                 s.mode,
                                 s.std_dev,
                                 s.skewness,
                                 s.kurtosis_excess,
                                 result.relative.mean[i],
                                 result.relative.median[i],
                                 result.relative.mode[i],
                                 result.relative.std_dev[i]};
        out += prefix;
        for (std::size_t f = 0; f < std::size(fields); ++f) {
            if (f > 0) out += ',';
            out += format_double(fields[f]);
        }
        out += '\n';
    }
    return out;
}

std::string curves_csv(const CellAnalysis& cell) {
    std::string out = "t,density,survival,hazard\n";
    for (std::size_t i = 0; i < cell.density.grid.size(); ++i) {
        out += format_double(cell.density.grid[i]);
        out += ',';
        out += format_double(cell.density.density[i]);
        out += ',';
        out += format_double(cell.reliability.survival[i]);
        out += ',';
        out += format_double(cell.hazard.rate[i]);
        out += '\n';
    }
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> fields;
        for (;;) {
            const std::size_t comma = line.find(',');
            fields.emplace_back(line.substr(0, comma));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::vector<std::size_t> decimation_indices(std::size_t size, std::size_t max_points) {
    std::vector<std::size_t> idx;
    if (size == 0) return idx;
    if (max_points == 0 || size <= max_points) {
        idx.resize(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        return idx;
    }
    if (max_points == 1) return {size - 1};
    // max_points - 1 equal strides between first and last.
    for (std::size_t k = 0; k < max_points; ++k) {
        idx.push_back(k * (size - 1) / (max_points - 1));
    }
    return idx;
}

namespace {

Json pick(const std::vector<double>& values, const std::vector<std::size_t>& idx) {
    Json arr = Json::array();
    for (const std::size_t i : idx) arr.push_back(values[i]);
    return arr;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

Json scenario_json(const ScenarioConfig& cfg) {
    return Json{{"model", to_string(cfg.dep.model)},
                {"n", cfg.arch.n_components},
                {"m", cfg.arch.m_required},
                {"p", cfg.dep.p},
                {"shape", cfg.dist.shape},
                {"scale", cfg.dist.scale},
                {"samples", cfg.nb},
                {"seed", cfg.seed}};
}

Json stats_json(const SummaryStats& s) {
    return Json{{"mean", s.mean},
                {"median", s.median},
                {"mode", s.mode},
                {"std_dev", s.std_dev},
                {"skewness", s.skewness},
                {"kurtosis_excess", s.kurtosis_excess},
                {"mean_std_error", s.mean_std_error},
                {"std_dev_std_error", s.std_dev_std_error},
                {"sample_count", s.sample_count},
                {"higher_moments_defined", s.higher_moments_defined}};
}

Json density_json(const DensityEstimate& density, std::size_t max_points) {
    const auto idx = decimation_indices(density.grid.size(), max_points);
    return Json{{"t", pick(density.grid, idx)}, {"density", pick(density.density, idx)}, {"bandwidth", density.bandwidth}};
}

Json reliability_json(const ReliabilityCurve& reliability, std::size_t max_points) {
    const auto idx = decimation_indices(reliability.t_grid.size(), max_points);
    return Json{{"t", pick(reliability.t_grid, idx)}, {"survival", pick(reliability.survival, idx)}};
}

Json hazard_json(const HazardCurve& hazard, std::size_t max_points) {
    const auto idx = decimation_indices(hazard.grid.size(), max_points);
    return Json{{"t", pick(hazard.grid, idx)}, {"rate", pick(hazard.rate, idx)}};
}

Json relative_json(const RelativeCurves& relative) {
    return Json{{"p", relative.p},
                {"mean", relative.mean},
                {"median", relative.median},
                {"mode", relative.mode},
                {"std_dev", relative.std_dev}};
}

Json metadata_json(const RunInfo& info, const Json& config) {
    return Json{{"tool", "moonlab"},
                {"version", kVersion},
                {"command", info.command},
                {"timestamp", utc_timestamp()},
                {"threads", info.threads},
                {"kernel", info.kernel},
                {"config", config}};
}

Json simulate_document(const ScenarioConfig& cfg, const CellAnalysis& cell, const RunInfo& info) {
    Json config = scenario_json(cfg);
    config["kde_grid"] = info.kde_grid;
    return Json{{"metadata", metadata_json(info, config)},
                {"stats", stats_json(cell.stats)},
                {"density", density_json(cell.density)},
                {"reliability", reliability_json(cell.reliability)},
                {"hazard", hazard_json(cell.hazard)},
                {"streamed", cell.streamed}};
}

Json sweep_document(const SweepConfig& cfg, const SweepResult& result, const RunInfo& info) {
    Json config = scenario_json(cfg.base);
    config.erase("p");
    config["p_grid"] = cfg.p_grid;
    config["kde_grid"] = info.kde_grid;
    Json points = Json::array();
    for (const auto& point : result.points) {
        points.push_back(Json{{"p", point.p},
                              {"stats", stats_json(point.cell.stats)},
                              {"density", density_json(point.cell.density)},
                              {"reliability", reliability_json(point.cell.reliability)}});
    }
    return Json{{"metadata", metadata_json(info, config)},
                {"baseline", stats_json(result.baseline)},
                {"points", points},
                {"relative", relative_json(result.relative)}};
}

Json payload_without_timestamp(Json document) {
    if (document.contains("metadata")) document["metadata"].erase("timestamp");
    return document;
}

OracleAnswer evaluate_oracle(const OracleQuery& q) {
    validate(q.arch);
    validate(q.dist);
    validate(DependencyConfig{q.model, q.p});
    if (q.mean == q.t.has_value()) {
        throw ValidationError("t", "give exactly one of a reliability time t or the mean flag");
    }
    const oracle::SurvivalFunction s{q.dist};
    if (q.t) {
        if (!(*q.t >= 0.0)) throw ValidationError("t", "must be non-negative");
        const char* method = q.model == DependencyModel::Linear && q.p > 0.0 && q.p < 1.0 ? "quadrature"
                             : q.model == DependencyModel::MarginalCCF          ? "binomial-conditioning"
                                                                                : "closed-form";
        return {"reliability", oracle::model_reliability(q.model, *q.t, q.p, q.arch, s), method};
    }
    if (q.model != DependencyModel::MarginalCCF && q.dist.shape == 1.0) {
        return {"mean", oracle::linear_mean_prediction(q.p, q.arch, q.dist), "closed-form"};
    }
    if (q.model == DependencyModel::Linear && !q.quadrature) {
        throw UnsupportedError("linear-model mean has no closed form for shape != 1; pass --quadrature to integrate");
    }
    return {"mean", oracle::model_mean(q.model, q.p, q.arch, q.dist), "quadrature"};
}

std::string oracle_json_text(const OracleQuery& q, const OracleAnswer& a) {
    std::string out = "{\"model\":\"" + std::string(to_string(q.model)) + "\",\"n\":" +
                      std::to_string(q.arch.n_components) + ",\"m\":" + std::to_string(q.arch.m_required) +
                      ",\"p\":" + format_significant(q.p) + ",\"shape\":" + format_significant(q.dist.shape) +
                      ",\"scale\":" + format_significant(q.dist.scale);
    if (q.t) out += ",\"t\":" + format_significant(*q.t);
    out += ",\"method\":\"" + a.method + "\",\"" + a.quantity + "\":" + format_significant(a.value) + "}";
    return out;
}

}  // namespace moonlab::report

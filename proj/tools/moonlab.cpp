// moonlab command-line front end.
//
// Exit codes: 0 ok, 1 acceptance failure, 2 usage or validation error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moonlab/errors.hpp"
#include "moonlab/kernels.hpp"
#include "moonlab/parallel.hpp"
#include "moonlab/report.hpp"
#include "moonlab/selftest.hpp"
#include "moonlab/service.hpp"
#include "moonlab/sweep.hpp"
#include "moonlab/version.hpp"

namespace {

using namespace moonlab;

enum ExitCode { kOk = 0, kAcceptanceFailure = 1, kUsage = 2, kIo = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CellFlags {
    std::string model = "linear";
    int n = 3;
    int m = 2;
    double shape = 1.0;
    double scale = 1.0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    std::size_t kde_grid = kDefaultKdeGrid;
};

void add_cell_flags(CLI::App* cmd, CellFlags& f) {
    cmd->add_option("--model", f.model, "linear | global-ccf | marginal-ccf")->capture_default_str();
    cmd->add_option("--n", f.n, "number of components")->capture_default_str();
    cmd->add_option("--m", f.m, "components required to work")->capture_default_str();
    cmd->add_option("--shape", f.shape, "Weibull shape")->capture_default_str();
    cmd->add_option("--scale", f.scale, "Weibull scale")->capture_default_str();
    cmd->add_option("--samples", f.samples, "samples per cell")->capture_default_str();
    cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
    cmd->add_option("--out", f.out, "output file (default stdout)");
    cmd->add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--kde-grid", f.kde_grid, "density grid points")->capture_default_str();
}

DependencyModel model_of(const std::string& text) {
    const auto model = parse_model(text);
    if (!model) throw ValidationError("model", "must be one of linear, global-ccf, marginal-ccf");
    return *model;
}

ScenarioConfig scenario_of(const CellFlags& f, double p) {
    ScenarioConfig cfg;
    cfg.dep = {model_of(f.model), p};
    cfg.arch = {f.n, f.m};
    cfg.dist = {f.shape, f.scale};
    cfg.nb = f.samples;
    cfg.seed = f.seed;
    validate(cfg);
    if (cfg.nb < 2) throw ValidationError("samples", "must be at least 2");
    if (f.kde_grid < 16 || f.kde_grid > 65536) throw ValidationError("kde-grid", "must be between 16 and 65536");
    return cfg;
}

report::RunInfo run_info(const std::string& command, std::size_t kde_grid) {
    report::RunInfo info;
    info.command = command;
    info.threads = resolve_threads(0);
    info.kernel = std::string(kernels::to_string(kernels::active_kernels().isa));
    info.kde_grid = kde_grid;
    return info;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
    file.close();
    if (!file) throw IoError("failed writing '" + path + "'");
}

std::vector<double> parse_p_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ValidationError("p-list", "'" + item + "' is not a number");
        values.push_back(v);
    }
    if (values.empty()) throw ValidationError("p-list", "must contain at least one value");
    return values;
}

int run_simulate(const CellFlags& f, double p) {
    const ScenarioConfig cfg = scenario_of(f, p);
    AnalysisOptions analysis;
    analysis.kde_grid = f.kde_grid;
    const CellAnalysis cell = analyze_cell(cfg, analysis);
    if (f.format == "csv") {
        emit(f.out, report::curves_csv(cell));
    } else {
        emit(f.out, report::simulate_document(cfg, cell, run_info("simulate", f.kde_grid)).dump(2) + "\n");
    }
    return kOk;
}

int run_sweep(const CellFlags& f, std::size_t grid_count, const std::string& p_list) {
    SweepConfig sc;
    sc.base = scenario_of(f, 0.0);
    if (!p_list.empty()) {
        sc.p_grid = parse_p_list(p_list);
    } else {
        if (grid_count < 2) throw ValidationError("p-grid", "must be at least 2");
        sc.p_grid = default_p_grid(grid_count);
    }
    sc.analysis.kde_grid = f.kde_grid;
    const SweepResult result = sweep(sc);
    if (f.format == "json") {
        emit(f.out, report::sweep_document(sc, result, run_info("sweep", f.kde_grid)).dump(2) + "\n");
    } else {
        emit(f.out, report::sweep_csv(result));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moonlab: Monte Carlo reliability of M-out-of-N systems with dependent components"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CellFlags sim_flags;
    double sim_p = 0.0;
    auto* simulate = app.add_subcommand("simulate", "simulate one cell");
    add_cell_flags(simulate, sim_flags);
    simulate->add_option("--p", sim_p, "dependency probability")->capture_default_str();

    CellFlags sweep_flags;
    std::size_t grid_count = 20;
    std::string p_list;
    auto* sweep_cmd = app.add_subcommand("sweep", "simulate a grid of p values");
    add_cell_flags(sweep_cmd, sweep_flags);
    auto* grid_opt = sweep_cmd->add_option("--p-grid", grid_count, "equally spaced p values from 0 to 1")
                         ->capture_default_str();
    sweep_cmd->add_option("--p-list", p_list, "comma-separated p values")->excludes(grid_opt);

    report::OracleQuery query;
    std::string oracle_model = "linear";
    double oracle_t = 0.0;
    auto* oracle_cmd = app.add_subcommand("oracle", "evaluate the analytic reliability or mean");
    oracle_cmd->add_option("--model", oracle_model, "linear | global-ccf | marginal-ccf")->capture_default_str();
    oracle_cmd->add_option("--n", query.arch.n_components)->capture_default_str();
    oracle_cmd->add_option("--m", query.arch.m_required)->capture_default_str();
    oracle_cmd->add_option("--p", query.p)->capture_default_str();
    oracle_cmd->add_option("--shape", query.dist.shape)->capture_default_str();
    oracle_cmd->add_option("--scale", query.dist.scale)->capture_default_str();
    auto* t_opt = oracle_cmd->add_option("--t", oracle_t, "reliability at time t");
    auto* mean_opt = oracle_cmd->add_flag("--mean", query.mean, "mean time to failure");
    t_opt->excludes(mean_opt);
    oracle_cmd->add_flag("--quadrature", query.quadrature, "allow numerical integration for the linear-model mean");

    selftest::Options st;
    auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");
    selftest_cmd->add_option("--samples", st.samples, "samples per cell")->capture_default_str();
    selftest_cmd->add_option("--seed", st.seed)->capture_default_str();
    selftest_cmd->add_flag("--canary", st.canary, "corrupt the engine (suite must fail)")->group("");

    std::optional<int> port;
    std::string host = "127.0.0.1";
    auto* serve = app.add_subcommand("serve", "start the HTTP API");
    serve->add_option("--port", port, "listen port (default MOONLAB_PORT or 8080)");
    serve->add_option("--host", host)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*simulate) {
            if (sim_flags.format.empty()) sim_flags.format = "json";
            return run_simulate(sim_flags, sim_p);
        }
        if (*sweep_cmd) {
            if (sweep_flags.format.empty()) sweep_flags.format = "csv";
            return run_sweep(sweep_flags, grid_count, p_list);
        }
        if (*oracle_cmd) {
            query.model = model_of(oracle_model);
            if (*t_opt) query.t = oracle_t;
            const report::OracleAnswer answer = report::evaluate_oracle(query);
            std::cout << report::oracle_json_text(query, answer) << "\n";
            return kOk;
        }
        if (*selftest_cmd) {
            if (st.samples < 2) throw ValidationError("samples", "must be at least 2");
            return selftest::run(st, std::cout).passed() ? kOk : kAcceptanceFailure;
        }
        if (*serve) {
            service::ServiceConfig config = service::config_from_env();
            config.host = host;
            if (port) config.port = *port;
            service::Server server(config);
            const int bound = server.bind();
            if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(config.port));
            std::cerr << "moonlab " << kVersion << " listening on http://" << host << ":" << bound << "\n";
            return server.listen() ? kOk : kIo;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid " << e.field() << ": " << e.reason() << "\n";
        return kUsage;
    } catch (const UnsupportedError& e) {
        std::cerr << "error: unsupported: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

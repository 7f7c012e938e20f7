#include "moonlab/service.hpp"

#include <chrono>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <httplib.h>

#include "moonlab/errors.hpp"
#include "moonlab/kernels.hpp"
#include "moonlab/parallel.hpp"
#include "moonlab/report.hpp"
#include "moonlab/sweep.hpp"
#include "moonlab/version.hpp"

namespace moonlab::service {

namespace {

struct FieldError {
    std::string field;
    std::string reason;
};

Response validation_failure(const std::vector<FieldError>& errors) {
    Json details = Json::array();
    for (const auto& e : errors) details.push_back(Json{{"field", e.field}, {"reason", e.reason}});
    return {422, Json{{"error", "validation"}, {"details", details}}};
}

Response message(int status, std::string_view kind, std::string_view text) {
    return {status, Json{{"error", kind}, {"message", text}}};
}

// Pulls typed fields out of a request object, recording one error per bad field.
class Reader {
public:
    explicit Reader(const Json& obj) : obj_(obj) {}

    template <class T>
    T integer(const char* field, T fallback) {
        if (!obj_.contains(field)) return fallback;
        const Json& v = obj_[field];
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            const auto raw = v.get<std::uint64_t>();
            if (raw <= static_cast<std::uint64_t>(std::numeric_limits<T>::max())) return static_cast<T>(raw);
            fail(field, "out of range");
            return fallback;
        }
        if (v.is_number_integer() && std::numeric_limits<T>::is_signed) return static_cast<T>(v.get<std::int64_t>());
        fail(field, v.is_number_integer() ? "must be non-negative" : "must be an integer");
        return fallback;
    }

    double number(const char* field, double fallback) {
        if (!obj_.contains(field)) return fallback;
        const Json& v = obj_[field];
        if (v.is_number()) return v.get<double>();
        fail(field, "must be a number");
        return fallback;
    }

    bool boolean(const char* field, bool fallback) {
        if (!obj_.contains(field)) return fallback;
        const Json& v = obj_[field];
        if (v.is_boolean()) return v.get<bool>();
        fail(field, "must be a boolean");
        return fallback;
    }

    DependencyModel model() {
        if (!obj_.contains("model")) return DependencyModel::Linear;
        const Json& v = obj_["model"];
        if (v.is_string()) {
            if (auto m = parse_model(v.get<std::string>())) return *m;
        }
        fail("model", "must be one of linear, global-ccf, marginal-ccf");
        return DependencyModel::Linear;
    }

    void fail(std::string field, std::string reason) { errors.push_back({std::move(field), std::move(reason)}); }

    std::vector<FieldError> errors;

private:
    const Json& obj_;
};

struct ParsedRequest {
    ScenarioConfig cfg;
    std::size_t kde_grid = kDefaultKdeGrid;
    bool include_oracle = false;
    std::vector<double> p_grid;
};

std::optional<Json> parse_body(const std::string& body, Response& failure) {
    Json obj = body.empty() ? Json::object() : Json::parse(body, nullptr, false);
    if (obj.is_discarded()) {
        failure = message(400, "bad_request", "request body is not valid JSON");
        return std::nullopt;
    }
    if (!obj.is_object()) {
        failure = message(400, "bad_request", "request body must be a JSON object");
        return std::nullopt;
    }
    return obj;
}

// Type checks first, then the domain rules shared with the CLI.
std::optional<ParsedRequest> parse_request(const std::string& body, bool sweep_request, const ServiceConfig& config,
                                           Response& failure) {
    const auto obj = parse_body(body, failure);
    if (!obj) return std::nullopt;
    Reader in(*obj);
    ParsedRequest req;
    ScenarioConfig& cfg = req.cfg;
    cfg.dep.model = in.model();
    cfg.arch.n_components = in.integer<int>("n", 3);
    cfg.arch.m_required = in.integer<int>("m", 2);
    cfg.dist.shape = in.number("shape", 1.0);
    cfg.dist.scale = in.number("scale", 1.0);
    cfg.nb = in.integer<std::uint64_t>("samples", 1'000'000);
    cfg.seed = in.integer<std::uint64_t>("seed", 0);
    req.kde_grid = in.integer<std::size_t>("kde_grid", kDefaultKdeGrid);
    req.include_oracle = in.boolean("include_oracle", false);

    if (sweep_request) {
        req.p_grid = default_p_grid();
        if (obj->contains("p_grid")) {
            const Json& g = (*obj)["p_grid"];
            if (g.is_number_integer()) {
                const auto count = g.get<std::int64_t>();
                if (count >= 2 && count <= 1000) {
                    req.p_grid = default_p_grid(static_cast<std::size_t>(count));
                } else {
                    in.fail("p_grid", "point count must be between 2 and 1000");
                }
            } else if (g.is_array() && !g.empty()) {
                req.p_grid.clear();
                for (const Json& v : g) {
                    if (!v.is_number()) {
                        in.fail("p_grid", "values must be numbers");
                        break;
                    }
                    req.p_grid.push_back(v.get<double>());
                }
            } else {
                in.fail("p_grid", "must be a point count or a non-empty array of probabilities");
            }
        }
    } else {
        cfg.dep.p = in.number("p", 0.0);
    }
    if (!in.errors.empty()) {
        failure = validation_failure(in.errors);
        return std::nullopt;
    }

    try {
        validate(cfg);
        if (sweep_request) {
            SweepConfig probe;
            probe.base = cfg;
            probe.p_grid = req.p_grid;
            validate(probe);
        }
    } catch (const ValidationError& e) {
        failure = validation_failure({{e.field(), e.reason()}});
        return std::nullopt;
    }
    if (req.kde_grid < 16 || req.kde_grid > 65536) {
        failure = validation_failure({{"kde_grid", "must be between 16 and 65536"}});
        return std::nullopt;
    }
    if (cfg.nb < 2) {
        failure = validation_failure({{"samples", "must be at least 2"}});
        return std::nullopt;
    }
    if (cfg.nb > config.sample_cap) {
        failure = {413, Json{{"error", "too_large"},
                             {"message", "samples exceeds the server cap of " + std::to_string(config.sample_cap)},
                             {"max_samples", config.sample_cap}}};
        return std::nullopt;
    }
    return req;
}

Json request_echo(const ParsedRequest& req, bool sweep_request) {
    Json echo = report::scenario_json(req.cfg);
    if (sweep_request) {
        echo.erase("p");
        echo["p_grid"] = req.p_grid;
    }
    echo["kde_grid"] = req.kde_grid;
    echo["include_oracle"] = req.include_oracle;
    return echo;
}

Json cell_json(const CellAnalysis& cell) {
    return Json{{"stats", report::stats_json(cell.stats)},
                {"density", report::density_json(cell.density, kMaxCurvePoints)},
                {"reliability", report::reliability_json(cell.reliability, kMaxCurvePoints)}};
}

Json oracle_curve(const ScenarioConfig& cfg, const ReliabilityCurve& curve) {
    const oracle::SurvivalFunction s{cfg.dist};
    Json t = Json::array();
    Json r = Json::array();
    for (const std::size_t i : report::decimation_indices(curve.t_grid.size(), kMaxCurvePoints)) {
        const double ti = curve.t_grid[i];
        t.push_back(ti);
        r.push_back(oracle::model_reliability(cfg.dep.model, ti, cfg.dep.p, cfg.arch, s));
    }
    return Json{{"t", t}, {"reliability", r}};
}

EngineOptions engine_options(const ServiceConfig& config) {
    EngineOptions opts;
    opts.threads = resolve_threads(config.threads);
    return opts;
}

template <class Fn>
Response guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        return validation_failure({{e.field(), e.reason()}});
    } catch (const ResourceLimitError& e) {
        return message(413, "too_large", e.what());
    } catch (const UnsupportedError& e) {
        return message(422, "unsupported", e.what());
    } catch (const DomainError& e) {
        return message(422, "domain", e.what());
    } catch (const std::exception& e) {
        return message(500, "internal", e.what());
    }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

unsigned env_unsigned(const char* name, unsigned fallback, unsigned max) {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (*end != '\0' || raw[0] == '-' || v > max) throw ValidationError(name, "must be an integer in [0, " + std::to_string(max) + "]");
    return static_cast<unsigned>(v);
}

}  // namespace

ServiceConfig config_from_env() {
    ServiceConfig config;
    config.port = static_cast<int>(env_unsigned("MOONLAB_PORT", 8080, 65535));
    if (const char* cap = std::getenv("MOONLAB_SAMPLE_CAP"); cap != nullptr && *cap != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(cap, &end, 10);
        if (*end != '\0' || cap[0] == '-' || v < 2) throw ValidationError("MOONLAB_SAMPLE_CAP", "must be an integer >= 2");
        config.sample_cap = v;
    }
    config.threads = env_unsigned("MOONLAB_THREADS", 0, 4096);
    if (const char* dir = std::getenv("MOONLAB_UI_DIR")) config.ui_dir = dir;
    return config;
}

Response handle_health() {
    return {200, Json{{"status", "ok"}, {"version", kVersion}}};
}

Response handle_simulate(const std::string& body, const ServiceConfig& config) {
    return guarded([&]() -> Response {
        const auto start = std::chrono::steady_clock::now();
        Response failure;
        const auto req = parse_request(body, false, config, failure);
        if (!req) return failure;
        AnalysisOptions analysis;
        analysis.kde_grid = req->kde_grid;
        const CellAnalysis cell = analyze_cell(req->cfg, analysis, engine_options(config));
        Json out = cell_json(cell);
        out["request"] = request_echo(*req, false);
        if (req->include_oracle) out["oracle"] = oracle_curve(req->cfg, cell.reliability);
        out["version"] = kVersion;
        out["compute_ms"] = elapsed_ms(start);
        return {200, out};
    });
}

Response handle_sweep(const std::string& body, const ServiceConfig& config) {
    return guarded([&]() -> Response {
        const auto start = std::chrono::steady_clock::now();
        Response failure;
        const auto req = parse_request(body, true, config, failure);
        if (!req) return failure;
        SweepConfig sc;
        sc.base = req->cfg;
        sc.p_grid = req->p_grid;
        sc.analysis.kde_grid = req->kde_grid;
        const SweepResult result = sweep(sc, engine_options(config));

        Json points = Json::array();
        for (const auto& point : result.points) {
            Json entry = cell_json(point.cell);
            entry["p"] = point.p;
            if (req->include_oracle) {
                ScenarioConfig cell_cfg = sc.base;
                cell_cfg.dep.p = point.p;
                entry["oracle"] = oracle_curve(cell_cfg, point.cell.reliability);
            }
            points.push_back(std::move(entry));
        }
        Json out{{"request", request_echo(*req, true)},
                 {"points", points},
                 {"baseline", report::stats_json(result.baseline)},
                 {"relative", report::relative_json(result.relative)},
                 {"version", kVersion}};
        out["compute_ms"] = elapsed_ms(start);
        return {200, out};
    });
}

Response handle_oracle(const std::string& body, const ServiceConfig&) {
    return guarded([&]() -> Response {
        Response failure;
        const auto obj = parse_body(body, failure);
        if (!obj) return failure;
        Reader in(*obj);
        report::OracleQuery q;
        q.model = in.model();
        q.arch.n_components = in.integer<int>("n", 3);
        q.arch.m_required = in.integer<int>("m", 2);
        q.dist.shape = in.number("shape", 1.0);
        q.dist.scale = in.number("scale", 1.0);
        q.p = in.number("p", 0.0);
        if (obj->contains("t")) q.t = in.number("t", 0.0);
        q.mean = in.boolean("mean", false);
        q.quadrature = in.boolean("quadrature", false);
        if (!in.errors.empty()) return validation_failure(in.errors);
        const report::OracleAnswer a = report::evaluate_oracle(q);
        Json out = Json::parse(report::oracle_json_text(q, a));
        return {200, out};
    });
}

struct Server::Impl {
    ServiceConfig config;
    httplib::Server server;
    int port = -1;
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    auto& svr = impl_->server;
    const std::size_t workers = std::max<std::size_t>(1, impl_->config.workers);
    svr.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    const ServiceConfig* cfg = &impl_->config;
    svr.Get("/api/v1/health", [reply](const httplib::Request&, httplib::Response& res) { reply(res, handle_health()); });
    svr.Post("/api/v1/simulate", [reply, cfg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_simulate(req.body, *cfg));
    });
    svr.Post("/api/v1/sweep", [reply, cfg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_sweep(req.body, *cfg));
    });
    svr.Post("/api/v1/oracle", [reply, cfg](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_oracle(req.body, *cfg));
    });
    if (!impl_->config.ui_dir.empty()) svr.set_mount_point("/", impl_->config.ui_dir);
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& c = impl_->config;
    impl_->port = c.port == 0 ? impl_->server.bind_to_any_port(c.host) : (impl_->server.bind_to_port(c.host, c.port) ? c.port : -1);
    return impl_->port;
}

bool Server::listen() { return impl_->server.listen_after_bind(); }

void Server::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace moonlab::service

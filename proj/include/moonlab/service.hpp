#pragma once

// HTTP JSON front end. The handlers are plain functions so they can be tested
// without a socket; Server wires them to httplib.

#include <cstdint>
#include <memory>
#include <string>

#include <json.hpp>

namespace moonlab::service {

using Json = nlohmann::json;

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::uint64_t sample_cap = 10'000'000;
    /// Simulation threads per request; 0 resolves like the CLI.
    unsigned threads = 0;
    /// Concurrent request handlers.
    std::size_t workers = 4;
    /// Static files served at "/" when non-empty.
    std::string ui_dir;
};

/// Reads MOONLAB_PORT, MOONLAB_SAMPLE_CAP, MOONLAB_THREADS and MOONLAB_UI_DIR.
/// Throws ValidationError for malformed values.
ServiceConfig config_from_env();

inline constexpr std::size_t kMaxCurvePoints = 1024;

struct Response {
    int status = 200;
    Json body;
};

Response handle_health();
Response handle_simulate(const std::string& body, const ServiceConfig& config);
Response handle_sweep(const std::string& body, const ServiceConfig& config);
Response handle_oracle(const std::string& body, const ServiceConfig& config);

class Server {
public:
    explicit Server(ServiceConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds config.port (0 picks a free port) and returns the bound port, or -1.
    int bind();
    /// Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace moonlab::service

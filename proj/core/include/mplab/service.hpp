#pragma once

// HTTP+JSON adapter over ExperimentRun. Service::handle is a pure router from
// Request to Response so it can be exercised without a socket; serve_http
// binds it to a listening port.
//
// Endpoints (bodies are JSON):
//   GET  /health
//   GET  /content/messages
//   POST /sessions                       {"subject_id"}           -> token
//   GET  /sessions/{id}                  subject|experimenter     -> stage summary
//   POST /sessions/{id}/begin            subject
//   GET  /sessions/{id}/task             subject                  -> current task screen
//   POST /sessions/{id}/choices          subject {"task","row","option"} | {"task","decision"}
//   POST /sessions/{id}/questionnaire    subject {"answers": {"A": "1999", ...}}
//   POST /sessions/{id}/reveal           subject (seeded die mode)
//   POST /sessions/{id}/rolls            experimenter {"task","row","outcome"}
//   GET  /sessions/{id}/payout           subject|experimenter (after payment)
//   GET  /sessions/{id}/events           experimenter
//   GET  /runs/current                   experimenter dashboard
//   POST /runs/current/close             experimenter
//   GET  /runs/current/export            experimenter; ?file=choices|demographics for raw TSV
//
// Tokens travel as "Authorization: Bearer <token>". Choice submissions accept
// an "Idempotency-Key" header; a repeated key returns the first response.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "mplab/session.hpp"

namespace mplab {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "mplab-data";   // event logs and tokens
    std::filesystem::path content_file;              // messages.json; built-in text when empty
    std::filesystem::path menus_dir;                 // task1.menu .. task6.menu; defaults when empty
    std::uint64_t seed = 0;
    DieMode die_mode = DieMode::SEEDED_RNG;
    std::optional<std::size_t> capacity;
    std::string experimenter_token;                  // generated when empty
};

// Reads a JSON config file with the ServiceConfig field names. Relative paths
// resolve against the file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path);

// MPL_PORT and MPL_DATA_DIR override the port and data directory.
void apply_env_overrides(ServiceConfig& config);

// Six menus from `menus_dir` (task<N>.menu) or the defaults.
ExperimentConfig experiment_config_for(const ServiceConfig& config);

struct Request {
    std::string method;                          // "GET", "POST"
    std::string path;                            // without the query string
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;  // keys lower-case
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

class Service {
public:
    // Restores sessions persisted under config.data_dir.
    explicit Service(ServiceConfig config);
    Service(ServiceConfig config, ExperimentConfig experiment);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response handle(const Request& request);

    const std::string& experimenter_token() const;
    const ServiceConfig& config() const;
    ExperimentRun& run();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Blocks serving `service` until the process is stopped. Throws Error when the
// address cannot be bound.
void serve_http(Service& service, const std::string& host, int port);

}  // namespace mplab

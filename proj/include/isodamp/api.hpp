#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace isodamp {

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON, or "ok" for /health
    std::string content_type = "application/json";
};

// Dispatches one request. Success bodies carry the pipeline payload plus
// "config_hash"; failures carry {"error", "path"?, "config_hash"?}.
// 400 invalid config, 409 infeasible design, 422 analysis failure,
// 207 when some simulation runs diverged, 408 past the compute timeout.
ApiResponse handle_request(const std::string& method, const std::string& path, const std::string& body,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));

// HTTP front end with permissive CORS.
class ApiServer {
public:
    ApiServer();
    ~ApiServer();

    // Binds without serving; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    // Serves on the bound socket until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// bind + listen, blocking.
void serve(const std::string& bind, int port);

} // namespace isodamp

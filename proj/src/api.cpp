#include "isodamp/api.hpp"

#include <future>
#include <memory>
#include <thread>

#include <httplib.h>

#include "isodamp/pipeline.hpp"

namespace isodamp {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& what, const json& extra = json::object()) {
    json body = extra;
    body["error"] = what;
    return {status, body.dump()};
}

using Runner = PipelineResult (*)(const ProjectConfig&);

Runner runner_for(const std::string& path) {
    if (path == "/analyze") return run_analyze;
    if (path == "/design") return run_design;
    if (path == "/simulate") return run_simulate;
    return nullptr;
}

} // namespace

ApiResponse handle_request(const std::string& method, const std::string& path, const std::string& body,
                           std::chrono::milliseconds timeout) {
    if (path == "/health") {
        if (method != "GET") return error(405, "method not allowed");
        return {200, "ok", "text/plain"};
    }
    const Runner run = runner_for(path);
    if (!run) return error(404, "not found");
    if (method != "POST") return error(405, "method not allowed");

    ProjectConfig config;
    try {
        config = parse_config(body);
    } catch (const ConfigError& e) {
        return error(400, e.what(), {{"path", e.path()}});
    } catch (const Error& e) {
        return error(400, e.what());
    }
    const std::string hash = config_hash(config);
    const json tag = {{"config_hash", hash}};

    // the worker owns its inputs so a timed-out computation can finish detached
    auto promise = std::make_shared<std::promise<ApiResponse>>();
    auto future = promise->get_future();
    std::thread([promise, config = std::move(config), run, hash]() {
        try {
            PipelineResult r = run(config);
            r.payload["config_hash"] = hash;
            promise->set_value({r.exit_code == kExitDiverged ? 207 : 200, r.payload.dump()});
        } catch (const ConfigError& e) {
            promise->set_value(error(400, e.what(), {{"path", e.path()}, {"config_hash", hash}}));
        } catch (const InfeasibleDesign& e) {
            promise->set_value(error(409, e.what(), {{"config_hash", hash}}));
        } catch (const std::exception& e) {
            promise->set_value(error(422, e.what(), {{"config_hash", hash}}));
        }
    }).detach();

    if (future.wait_for(timeout) != std::future_status::ready) return error(408, "compute timeout", tag);
    return future.get();
}

struct ApiServer::Impl {
    httplib::Server server;
};

ApiServer::ApiServer() : impl_(std::make_unique<Impl>()) {
    auto& server = impl_->server;
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    auto handler = [](const httplib::Request& req, httplib::Response& res) {
        const ApiResponse r = handle_request(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get("/health", handler);
    server.Post("/analyze", handler);
    server.Post("/design", handler);
    server.Post("/simulate", handler);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    auto& server = impl_->server;
    if (port == 0) {
        const int p = server.bind_to_any_port(host);
        if (p < 0) throw Error("cannot bind " + host);
        return p;
    }
    if (!server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void ApiServer::listen() {
    if (!impl_->server.listen_after_bind()) throw Error("server stopped with an error");
}

void ApiServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void serve(const std::string& bind, int port) {
    ApiServer server;
    server.bind(bind, port);
    server.listen();
}

} // namespace isodamp

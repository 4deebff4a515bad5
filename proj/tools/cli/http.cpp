#include "http.hpp"

#include <httplib.h>

namespace scc::cli {

void install_routes(httplib::Server& server, std::shared_ptr<const service::CommentService> service) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    const auto handler = [service](const httplib::Request& req, httplib::Response& res) {
        const auto r = service->handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        const auto r = service::error_response(500, "internal", message);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    });
}

}  // namespace scc::cli

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "scc/commentary/bundle.hpp"

namespace scc::service {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// {"error": {"code": ..., "message": ...}} with the given HTTP status.
ApiResponse error_response(int status, std::string_view code, std::string_view message);

struct ServiceOptions {
    commentary::GenerationConfig generation = [] {
        commentary::GenerationConfig g;
        g.method = commentary::GenerationConfig::Method::greedy;
        return g;
    }();
    int default_horizon = 4;
};

/// Transport-independent request handling over one immutable bundle. All
/// methods are const and safe to call from several threads at once.
class CommentService {
public:
    CommentService(std::shared_ptr<const commentary::Bundle> bundle, ServiceOptions options = {});

    const std::string& model_id() const noexcept { return bundle_->model_id; }

    /// GET /api/health
    ApiResponse health() const;
    /// POST /api/legal: {"fen"} -> {"moves": [uci...]}
    ApiResponse legal(const nlohmann::json& request) const;
    /// POST /api/comment: {"fen", "move", "categories"?, "horizon"?, "beam"?}
    ApiResponse comment(const nlohmann::json& request) const;

    /// Routes a raw request; malformed JSON, unknown paths and wrong methods
    /// become structured 4xx responses.
    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

private:
    std::shared_ptr<const commentary::Bundle> bundle_;
    ServiceOptions options_;
};

}  // namespace scc::service

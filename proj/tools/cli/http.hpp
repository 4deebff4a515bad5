#pragma once

#include <memory>

#include "scc/service/api.hpp"

namespace httplib {
class Server;
}

namespace scc::cli {

/// Routes every request to `service` and adds permissive CORS headers so a
/// browser client on another origin can call the API.
void install_routes(httplib::Server& server, std::shared_ptr<const service::CommentService> service);

}  // namespace scc::cli

#include "scc/service/api.hpp"

#include "scc/chess/notation.hpp"

namespace scc::service {

namespace {

using nlohmann::json;

std::string_view code_of(chess::ChessError::Kind kind) {
    switch (kind) {
        case chess::ChessError::Kind::malformed_fen: return "malformed_fen";
        case chess::ChessError::Kind::illegal_move: return "illegal_move";
        case chess::ChessError::Kind::ambiguous_move: return "ambiguous_move";
        case chess::ChessError::Kind::unparseable_move: return "unparseable_move";
    }
    return "bad_request";
}

// Thrown inside handlers and turned into a 400 response.
struct BadRequest {
    std::string code;
    std::string message;
};

const json& field(const json& request, const char* name, json::value_t type, const char* type_name) {
    if (!request.is_object()) throw BadRequest{"bad_request", "request body must be a JSON object"};
    const auto it = request.find(name);
    if (it == request.end()) throw BadRequest{"missing_field", std::string("missing field '") + name + "'"};
    const bool ok = type == json::value_t::number_integer ? it->is_number_integer() : it->type() == type;
    if (!ok) throw BadRequest{"bad_field", std::string("field '") + name + "' must be " + type_name};
    return *it;
}

chess::Board parse_board(const json& request) {
    const auto& fen = field(request, "fen", json::value_t::string, "a string").get_ref<const std::string&>();
    try {
        return chess::Board::from_fen(fen);
    } catch (const chess::ChessError& e) {
        throw BadRequest{std::string(code_of(e.kind())), e.what()};
    }
}

}  // namespace

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
    return {status, json{{"error", {{"code", code}, {"message", message}}}}};
}

CommentService::CommentService(std::shared_ptr<const commentary::Bundle> bundle, ServiceOptions options)
    : bundle_(std::move(bundle)), options_(std::move(options)) {
    if (!bundle_ || !bundle_->model) throw std::invalid_argument("service needs a loaded bundle");
    options_.generation.validate();
}

ApiResponse CommentService::health() const {
    json categories = json::array();
    for (const auto c : bundle_->model->categories()) categories.push_back(std::string(commentary::to_string(c)));
    return {200, json{{"status", "ok"}, {"model_id", model_id()}, {"categories", categories}}};
}

ApiResponse CommentService::legal(const json& request) const {
    try {
        const auto board = parse_board(request);
        json moves = json::array();
        for (const auto& m : chess::legal_moves(board)) moves.push_back(m.uci());
        return {200, json{{"fen", board.fen()}, {"moves", moves}, {"status", chess::to_string(chess::game_status(board))}}};
    } catch (const BadRequest& e) {
        return error_response(400, e.code, e.message);
    }
}

ApiResponse CommentService::comment(const json& request) const {
    try {
        commentary::CommentRequest req;
        req.board = parse_board(request);
        const auto& move_text = field(request, "move", json::value_t::string, "a string").get_ref<const std::string&>();
        try {
            req.move = chess::parse_move_text(req.board, move_text);
        } catch (const chess::ChessError& e) {
            throw BadRequest{std::string(code_of(e.kind())), e.what()};
        }
        if (request.contains("categories")) {
            const auto& cats = field(request, "categories", json::value_t::array, "an array of category names");
            for (const auto& name : cats) {
                if (!name.is_string()) throw BadRequest{"bad_field", "category names must be strings"};
                const auto c = commentary::parse_category(name.get<std::string>());
                if (!c || !bundle_->model->has(*c)) {
                    throw BadRequest{"unknown_category", "no model for category '" + name.get<std::string>() + "'"};
                }
                req.categories.push_back(*c);
            }
            if (req.categories.empty()) throw BadRequest{"bad_field", "categories must not be empty"};
        }
        req.horizon = options_.default_horizon;
        if (request.contains("horizon")) {
            const auto h = field(request, "horizon", json::value_t::number_integer, "an integer").get<long>();
            if (h < 1 || h > 16) throw BadRequest{"bad_horizon", "horizon must be in 1..16"};
            req.horizon = static_cast<int>(h);
        }
        req.generation = options_.generation;
        if (request.contains("beam")) {
            const auto k = field(request, "beam", json::value_t::number_integer, "an integer").get<long>();
            if (k < 1 || k > 16) throw BadRequest{"bad_field", "beam must be in 1..16"};
            req.generation.method = commentary::GenerationConfig::Method::beam;
            req.generation.beam_width = static_cast<std::size_t>(k);
        }

        const auto result = commentary::comment(*bundle_, req);
        json comments = json::object();
        for (const auto& c : result.comments) {
            const std::string name(commentary::to_string(c.category));
            if (c.error) {
                comments[name] = {{"error", {{"code", c.error->first}, {"message", c.error->second}}}};
            } else {
                comments[name] = {{"text", c.text}};
            }
        }
        json rollout = json::array();
        for (const auto& m : result.rollout) rollout.push_back(m.uci());
        return {200, json{{"fen", result.board.fen()},
                          {"move", result.move.uci()},
                          {"san", chess::to_san(result.board, result.move)},
                          {"comments", comments},
                          {"win_rate_before", result.win_rate_before},
                          {"win_rate_after", result.win_rate_after},
                          {"best_alternative", result.best_alternative.uci()},
                          {"best_alternative_degenerate", result.degenerate_alternative},
                          {"rollout", rollout},
                          {"model_id", result.model_id}}};
    } catch (const BadRequest& e) {
        return error_response(400, e.code, e.message);
    } catch (const commentary::CommentaryError& e) {
        return error_response(400, e.kind() == commentary::CommentaryError::Kind::illegal_move ? "illegal_move"
                                                                                                : "bad_request",
                              e.what());
    }
}

ApiResponse CommentService::handle(std::string_view method, std::string_view path, std::string_view body) const {
    const bool post = path == "/api/comment" || path == "/api/legal";
    if (path == "/api/health") {
        if (method != "GET") return error_response(405, "method_not_allowed", "use GET for /api/health");
        return health();
    }
    if (!post) return error_response(404, "not_found", "no endpoint " + std::string(path));
    if (method != "POST") return error_response(405, "method_not_allowed", "use POST for " + std::string(path));
    json request;
    try {
        request = json::parse(body);
    } catch (const json::parse_error& e) {
        return error_response(400, "bad_json", e.what());
    }
    try {
        return path == "/api/comment" ? comment(request) : legal(request);
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

}  // namespace scc::service

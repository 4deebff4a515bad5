#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/commentary/model.hpp"
#include "scc/data/commentary_data.hpp"

namespace scc::commentary {

/// A trained model ready for inference. On disk it is a directory holding
/// manifest.json, vocab.txt and model.ckpt.
struct Bundle {
    std::shared_ptr<const CommentaryModel> model;
    data::Vocabulary vocab;
    std::string model_id;  // content hash of model.ckpt
    nlohmann::json manifest;
};

class BundleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes the bundle directory and returns the model id. `extra` is merged
/// into the manifest (training settings and the like).
std::string save_bundle(const std::filesystem::path& dir, const CommentaryModel& model, const data::Vocabulary& vocab,
                        const nlohmann::json& extra = nlohmann::json::object());
Bundle load_bundle(const std::filesystem::path& dir);

struct CategoryComment {
    Category category;
    std::vector<std::string> tokens;
    std::string text;
    /// Set instead of text when the category cannot be produced
    /// (error code, human-readable message).
    std::optional<std::pair<std::string, std::string>> error;
};

struct CommentResult {
    chess::Board board;
    chess::Move move;
    double win_rate_before = 0.5;  // White's perspective
    double win_rate_after = 0.5;
    chess::Move best_alternative;
    bool degenerate_alternative = false;  // the move was the only legal one
    std::vector<chess::Move> rollout;  // argmax continuation after the move
    std::vector<CategoryComment> comments;
    std::string model_id;
};

struct CommentRequest {
    chess::Board board;
    chess::Move move;
    std::vector<Category> categories;  // empty: every category in the model
    int horizon = 4;
    GenerationConfig generation{};
};

/// Generates a comment per requested category. Throws CommentaryError
/// (illegal_move) when the move is not legal and std::invalid_argument for a
/// category the model lacks or a bad horizon. Win rates, the alternative and
/// the rollout come from the engine of the first requested category.
CommentResult comment(const Bundle& bundle, const CommentRequest& request);

/// Output records: one tab-separated line per generated comment; categories
/// that failed are left out.
std::string comment_tsv_header();
std::vector<std::string> comment_tsv_rows(const CommentResult& result);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace scc::commentary

#include "scc/commentary/bundle.hpp"

#include <cstdio>
#include <fstream>

namespace scc::commentary {

namespace {

constexpr const char* kFormat = "scc-commentary-bundle";
constexpr int kFormatVersion = 1;

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::string save_bundle(const std::filesystem::path& dir, const CommentaryModel& model, const data::Vocabulary& vocab,
                        const nlohmann::json& extra) {
    if (vocab.size() != model.config().vocab_size) {
        throw BundleError("vocabulary has " + std::to_string(vocab.size()) + " entries but the model expects " +
                          std::to_string(model.config().vocab_size));
    }
    std::filesystem::create_directories(dir);
    const auto ckpt = model.to_checkpoint();
    nn::save_checkpoint(dir / "model.ckpt", ckpt);
    vocab.save(dir / "vocab.txt");
    const auto id = nn::checkpoint_hash(ckpt);

    nlohmann::json manifest = extra.is_object() ? extra : nlohmann::json::object();
    manifest["format"] = kFormat;
    manifest["version"] = kFormatVersion;
    manifest["model_id"] = id;
    manifest["mode"] = std::string(to_string(model.mode()));
    manifest["categories"] = model.header().at("categories");
    std::ofstream out(dir / "manifest.json");
    if (!out) throw BundleError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    return id;
}

Bundle load_bundle(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw BundleError("no manifest.json in " + dir.string());
    Bundle b;
    try {
        b.manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw BundleError("bad manifest.json: " + std::string(e.what()));
    }
    if (b.manifest.value("format", "") != kFormat || b.manifest.value("version", 0) != kFormatVersion) {
        throw BundleError(dir.string() + " is not a version 1 commentary bundle");
    }
    try {
        const auto ckpt = nn::load_checkpoint(dir / "model.ckpt");
        b.model = CommentaryModel::from_checkpoint(ckpt);
        b.model_id = nn::checkpoint_hash(ckpt);
        b.vocab = data::Vocabulary::load(dir / "vocab.txt");
    } catch (const nn::CheckpointError& e) {
        throw BundleError(e.what());
    } catch (const data::DataError& e) {
        throw BundleError(e.what());
    }
    if (b.vocab.size() != b.model->config().vocab_size) throw BundleError("vocab.txt does not match model.ckpt");
    if (b.manifest.value("model_id", "") != b.model_id) throw BundleError("model.ckpt does not match its manifest");
    return b;
}

CommentResult comment(const Bundle& bundle, const CommentRequest& request) {
    const auto& model = *bundle.model;
    if (request.horizon < 1 || request.horizon > 16) throw std::invalid_argument("horizon must be in 1..16");
    request.generation.validate();
    auto categories = request.categories.empty() ? model.categories() : request.categories;
    for (const auto c : categories) {
        if (!model.has(c)) throw std::invalid_argument("model has no " + std::string(to_string(c)) + " decoder");
    }
    const auto legal = chess::find_legal(request.board, request.move);
    if (!legal) {
        throw CommentaryError(CommentaryError::Kind::illegal_move,
                              "move " + request.move.uci() + " is not legal in " + request.board.fen());
    }

    CommentResult out;
    out.board = request.board;
    out.move = *legal;
    out.model_id = bundle.model_id;
    const auto engine = model.engine(categories.front());
    const auto after = chess::apply_move(request.board, *legal);
    out.win_rate_before =
        engine::win_rate_for(engine.win_rate(request.board), request.board.side_to_move(), chess::Color::white);
    out.win_rate_after = engine::win_rate_for(engine.win_rate(after), after.side_to_move(), chess::Color::white);
    const auto alternative = engine.select_alternative(request.board, *legal);
    out.best_alternative = alternative.move;
    out.degenerate_alternative = alternative.degenerate;
    for (const auto& [board, move] : engine.rollout(after, request.horizon)) out.rollout.push_back(move);

    for (const auto c : categories) {
        CategoryComment cc{c, {}, {}, std::nullopt};
        try {
            const auto cont = plan_continuations(model.engine(c), request.board, *legal, c, request.horizon);
            cc.tokens = bundle.vocab.decode(generate(model, c, cont, request.generation));
            cc.text = join_tokens(cc.tokens);
        } catch (const CommentaryError& e) {
            if (e.kind() != CommentaryError::Kind::no_continuation) throw;
            cc.error.emplace("no_continuation", e.what());
        }
        out.comments.push_back(std::move(cc));
    }
    return out;
}

std::string comment_tsv_header() {
    return "fen\tmove\tcategory\ttext\twin_rate_before\twin_rate_after\talternative";
}

std::vector<std::string> comment_tsv_rows(const CommentResult& result) {
    std::vector<std::string> rows;
    const std::string alternative = result.degenerate_alternative ? "-" : result.best_alternative.uci();
    for (const auto& c : result.comments) {
        if (c.error) continue;
        rows.push_back(result.board.fen() + '\t' + result.move.uci() + '\t' + std::string(to_string(c.category)) +
                       '\t' + c.text + '\t' + fixed4(result.win_rate_before) + '\t' + fixed4(result.win_rate_after) +
                       '\t' + alternative);
    }
    return rows;
}

}  // namespace scc::commentary

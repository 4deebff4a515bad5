#include "scc/data/pgn.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "scc/chess/notation.hpp"

namespace scc::data {

std::optional<std::string> PgnGame::tag(const std::string& name) const {
    const auto it = tags.find(name);
    if (it == tags.end()) return std::nullopt;
    return it->second;
}

namespace {

bool is_result(std::string_view t) { return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*"; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    PgnParseResult run() {
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c == '%' && (pos_ == 0 || text_[pos_ - 1] == '\n')) {
                skip_line();
            } else if (c == '[') {
                if (in_movetext_) flush();
                parse_tag();
            } else if (c == '{') {
                skip_comment();
            } else if (c == ';') {
                skip_line();
            } else if (c == '(') {
                skip_variation();
            } else if (c == ')') {
                ++pos_;
            } else if (c == '$') {
                ++pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                movetext_token();
            }
        }
        flush();
        return std::move(result_);
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void skip_line() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    void skip_comment() {
        const auto end = text_.find('}', pos_);
        if (end == std::string_view::npos) {
            error("unterminated comment");
            pos_ = text_.size();
        } else {
            pos_ = end + 1;
        }
    }

    void skip_variation() {
        int depth = 0;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '{') {
                skip_comment();
                continue;
            }
            if (c == ';') {
                skip_line();
                continue;
            }
            ++pos_;
            if (c == '(') ++depth;
            if (c == ')' && --depth == 0) return;
        }
        error("unterminated variation");
    }

    void parse_tag() {
        in_game_ = true;
        const std::size_t line_end = std::min(text_.find('\n', pos_), text_.size());
        std::size_t p = pos_ + 1;
        auto fail = [&](const std::string& why) {
            error("malformed tag: " + why);
            pos_ = line_end;
        };
        while (p < line_end && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        const std::size_t name_start = p;
        while (p < line_end && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) ++p;
        if (p == name_start) return fail("missing name");
        const std::string name(text_.substr(name_start, p - name_start));
        while (p < line_end && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        if (p >= line_end || text_[p] != '"') return fail(name + " value is not quoted");
        ++p;
        std::string value;
        bool closed = false;
        while (p < line_end) {
            const char c = text_[p++];
            if (c == '\\' && p < line_end) {
                value += text_[p++];
            } else if (c == '"') {
                closed = true;
                break;
            } else {
                value += c;
            }
        }
        if (!closed) return fail(name + " value is not terminated");
        while (p < line_end && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        if (p >= line_end || text_[p] != ']') return fail(name + " is missing ']'");
        tags_[name] = value;
        pos_ = p + 1;
    }

    void movetext_token() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}' || c == '(' || c == ')' ||
                c == ';' || c == '[' || c == '$') {
                break;
            }
            ++pos_;
        }
        if (pos_ == start) {
            ++pos_;  // stray '}'
            return;
        }
        in_game_ = true;
        in_movetext_ = true;
        std::string_view token = text_.substr(start, pos_ - start);
        if (is_result(token)) {
            termination_ = std::string(token);
            flush();
            return;
        }
        // Move numbers: "12." "12..." or glued to the move ("12.e4").
        std::size_t i = 0;
        while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) ++i;
        if (i > 0 && i < token.size() && token[i] == '.') {
            while (i < token.size() && token[i] == '.') ++i;
            token.remove_prefix(i);
        } else if (i == token.size()) {
            return;  // bare number
        }
        while (!token.empty() && (token.back() == '!' || token.back() == '?')) token.remove_suffix(1);
        if (token.empty()) return;
        san_.emplace_back(token);
    }

    void error(const std::string& why) {
        in_game_ = true;
        if (!error_) error_ = why;
    }

    void flush() {
        if (!in_game_) return;
        const std::size_t index = next_index_++;
        if (error_) {
            result_.rejected.push_back({index, *error_});
        } else {
            replay(index);
        }
        tags_.clear();
        san_.clear();
        termination_.reset();
        error_.reset();
        in_game_ = false;
        in_movetext_ = false;
    }

    void replay(std::size_t index) {
        PgnGame game;
        game.index = index;
        game.tags = tags_;
        try {
            if (const auto fen = game.tag("FEN")) game.start = chess::Board::from_fen(*fen);
        } catch (const chess::ChessError& e) {
            result_.rejected.push_back({index, std::string("bad FEN tag: ") + e.what()});
            return;
        }
        auto board = game.start;
        for (std::size_t ply = 0; ply < san_.size(); ++ply) {
            std::string text = san_[ply];
            if (text == "0-0") text = "O-O";
            if (text == "0-0-0") text = "O-O-O";
            try {
                const auto move = chess::parse_move_text(board, text);
                game.moves.push_back(move);
                board = chess::apply_move(board, move);
            } catch (const chess::ChessError& e) {
                result_.rejected.push_back(
                    {index, "ply " + std::to_string(ply + 1) + " (" + san_[ply] + "): " + e.what()});
                return;
            }
        }
        game.san = san_;
        const auto tag_result = game.tag("Result");
        if (tag_result && is_result(*tag_result)) {
            game.result = *tag_result;
        } else if (termination_) {
            game.result = *termination_;
        }
        result_.games.push_back(std::move(game));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t next_index_ = 0;
    bool in_game_ = false;
    bool in_movetext_ = false;
    std::map<std::string, std::string> tags_;
    std::vector<std::string> san_;
    std::optional<std::string> termination_;
    std::optional<std::string> error_;
    PgnParseResult result_;
};

std::optional<int> parse_rating(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    int value = 0;
    const auto* begin = text->data();
    const auto* end = begin + text->size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace

PgnParseResult parse_pgn_text(std::string_view text) { return Parser(text).run(); }

PgnParseResult parse_pgn(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_pgn_text(buffer.str());
}

TupleExtraction extract_engine_tuples(const std::vector<PgnGame>& games, int min_rating) {
    TupleExtraction out;
    for (const auto& game : games) {
        const auto white = parse_rating(game.tag("WhiteElo"));
        const auto black = parse_rating(game.tag("BlackElo"));
        if (!white || !black) {
            ++out.missing_rating;
            continue;
        }
        if (*white < min_rating || *black < min_rating) {
            ++out.below_rating;
            continue;
        }
        double white_score;
        if (game.result == "1-0") {
            white_score = 1.0;
        } else if (game.result == "0-1") {
            white_score = 0.0;
        } else if (game.result == "1/2-1/2") {
            white_score = 0.5;
        } else {
            ++out.unfinished;
            continue;
        }
        ++out.accepted_games;
        auto board = game.start;
        for (const auto& move : game.moves) {
            const double v = board.side_to_move() == chess::Color::white ? white_score : 1.0 - white_score;
            out.tuples.push_back({board, move, v});
            board = chess::apply_move(board, move);
        }
    }
    return out;
}

}  // namespace scc::data

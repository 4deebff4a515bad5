#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scc/chess/board.hpp"
#include "scc/engine/engine.hpp"

namespace scc::data {

struct PgnGame {
    std::size_t index = 0;  // position in the input, counting rejected games
    std::map<std::string, std::string> tags;
    chess::Board start = chess::Board::start();
    std::vector<std::string> san;
    std::vector<chess::Move> moves;  // san replayed from `start`
    std::string result = "*";        // 1-0, 0-1, 1/2-1/2 or *

    std::optional<std::string> tag(const std::string& name) const;
};

struct PgnRejection {
    std::size_t index = 0;
    std::string reason;
};

struct PgnParseResult {
    std::vector<PgnGame> games;
    std::vector<PgnRejection> rejected;
};

/// Parses concatenated PGN games. Comments, variations and NAGs are skipped;
/// a game whose header is malformed or whose moves do not replay is rejected
/// with a reason and parsing continues with the next game.
PgnParseResult parse_pgn(std::istream& in);
PgnParseResult parse_pgn_text(std::string_view text);

struct TupleExtraction {
    std::vector<engine::TrainingTuple> tuples;
    std::size_t accepted_games = 0;
    std::size_t below_rating = 0;
    std::size_t missing_rating = 0;
    std::size_t unfinished = 0;
};

/// One tuple per ply of every finished game where both players are rated at
/// least `min_rating`; v' is the result from the mover's perspective.
TupleExtraction extract_engine_tuples(const std::vector<PgnGame>& games, int min_rating = 2000);

}  // namespace scc::data

#pragma once

#include <string>
#include <string_view>

#include "scc/chess/board.hpp"

namespace scc::chess {

/// Resolves UCI ("e2e4", "b7b8q") or SAN ("Nf3", "O-O", "exd5+") text to the
/// unique legal move on `board`.
///
/// Throws ChessError with kind unparseable_move, illegal_move or
/// ambiguous_move.
Move parse_move_text(const Board& board, std::string_view text);

Move parse_uci(const Board& board, std::string_view text);
Move parse_san(const Board& board, std::string_view text);

/// SAN for a legal move, including "+" / "#" suffixes.
std::string to_san(const Board& board, const Move& move);

}  // namespace scc::chess

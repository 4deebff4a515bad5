#pragma once

#include <cstdint>
#include <vector>

#include "scc/chess/board.hpp"
#include "scc/commentary/bundle.hpp"
#include "scc/commentary/model.hpp"
#include "scc/data/commentary_data.hpp"
#include "scc/engine/engine.hpp"

namespace scc::testing {

/// Boards visited by uniformly random playouts from the start position.
/// Every game is played until termination or `max_plies`.
std::vector<chess::Board> random_positions(std::size_t count, std::uint64_t seed, int max_plies = 120);

/// A small engine configuration for fast tests.
engine::EngineConfig tiny_engine_config(std::uint64_t seed = 1);

/// A small commentary model configuration (d = 16).
commentary::ModelConfig tiny_model_config(std::size_t vocab_size, std::uint64_t seed = 1);

/// Commentary records on random positions whose text is a function of the
/// move ("knight to f3"), `per_category` for each category, spread over
/// `games` game ids.
std::vector<data::CommentaryRecord> toy_records(std::size_t per_category, std::uint64_t seed, std::size_t games = 8);

/// An untrained mult-mode bundle over every category, vocabulary from
/// toy_records.
commentary::Bundle tiny_bundle(std::uint64_t seed = 1);

}  // namespace scc::testing

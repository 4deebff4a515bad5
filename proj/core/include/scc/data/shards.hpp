#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "scc/engine/engine.hpp"

namespace scc::data {

/// Binary tuple shard, all integers little-endian:
///
///   magic     8 bytes "SCCTUPL\n"
///   version   u32
///   count     u64
///   per tuple u16 FEN length, FEN bytes, u8 repetition count,
///             u8 previous repetition count, u8 from, u8 to,
///             u8 promotion slot, u8 outcome x 2
inline constexpr std::uint32_t kShardVersion = 1;

class ShardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_shard(std::span<const engine::TrainingTuple> tuples);
std::vector<engine::TrainingTuple> decode_shard(std::span<const std::uint8_t> bytes);

void write_shard(const std::filesystem::path& path, std::span<const engine::TrainingTuple> tuples);
std::vector<engine::TrainingTuple> read_shard(const std::filesystem::path& path);

}  // namespace scc::data

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scc/nn/parameter.hpp"

namespace scc::nn {

/// On-disk layout (all integers little-endian):
///
///   magic      8 bytes  "SCCCKPT\n"
///   version    u32
///   header     u64 length + UTF-8 JSON (model hyperparameters)
///   count      u64
///   per tensor u32 name length, name, u32 rank, rank x u64 extents,
///              values as IEEE-754 binary64 bit patterns
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    nlohmann::json header = nlohmann::json::object();
    std::vector<std::pair<std::string, Tensor>> tensors;

    const Tensor* find(const std::string& name) const;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Checkpoint make_checkpoint(nlohmann::json header, std::span<const ParameterPtr> params);

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt);
Checkpoint deserialize(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies stored values into `params` by name. Throws CheckpointError on a
/// missing name or shape mismatch.
void restore_parameters(const Checkpoint& ckpt, std::span<const ParameterPtr> params);

/// 64-bit FNV-1a of the serialized bytes, as 16 hex digits.
std::string content_hash(std::span<const std::uint8_t> bytes);
std::string checkpoint_hash(const Checkpoint& ckpt);

}  // namespace scc::nn

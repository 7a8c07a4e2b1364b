#pragma once

#include <filesystem>
#include <stdexcept>

#include "acae/model.hpp"

namespace acae {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout: magic "ACAE", format version (u32), U, I, K (u64), encoder
/// and decoder activation tags (u8), then W1, W2, b1, b2, P as row-major
/// little-endian 64-bit reals. Round trips are byte-exact.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);

/// Validates magic, version and shape consistency; throws CheckpointError
/// with the expected and actual byte counts on truncation.
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace acae

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abnn/model.hpp"

namespace abnn {

// Layout (all integers and floats little-endian):
//   "ABNN" | u32 version | u32 kind | u64 payload bytes | payload | u32 CRC32
// The CRC covers every byte before it. Payload:
//   AGN/ASN, d = 1:  u32 dim | u32 groups | u32 units
//   AGN/ASN, d >= 2: u32 dim | u32 layers | u32 hidden | f64 clamp | layers x d x u32 permutation
//   DeepSets:        u32 dim | u32 layers | u32 hidden | u32 middle
// followed in every case by u64 parameter count and the parameters as f64.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_model(const Model& model);
// Throws BadMagic, VersionMismatch, Truncated, ChecksumMismatch, Parse, or
// ModelKindMismatch when `expected` is set and differs.
Model deserialize_model(const std::vector<std::uint8_t>& bytes, std::optional<ModelKind> expected = std::nullopt);

void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path, std::optional<ModelKind> expected = std::nullopt);

}  // namespace abnn

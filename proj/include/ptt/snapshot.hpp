#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "ptt/model.hpp"

namespace ptt {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  FlowState state;
  ModelParams params;
};

/// Binary layout, little-endian throughout: "PTTF", u32 version, u32 n, f64 t,
/// f64 a, b, λ, μ, μ₁, μ₂, then u₁..u₃ and τ₁₁, τ₁₂, τ₁₃, τ₂₂, τ₂₃, τ₃₃, each as n³
/// (re, im) pairs in storage order.
void write_snapshot(std::ostream& out, const FlowState& state, const ModelParams& params);
void save_snapshot(const std::filesystem::path& path, const FlowState& state, const ModelParams& params);

/// Throws FormatError on bad magic or truncation, UnsupportedVersionError on an unknown version,
/// CorruptStateError when the loaded state breaks its invariants.
Snapshot read_snapshot(std::istream& in);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace ptt

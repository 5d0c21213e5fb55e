#pragma once

#include <string>
#include <string_view>

#include "mdlite/binary_io.h"
#include "mdlite/pair_style.h"
#include "mdlite/system.h"

namespace mdlite {

/// Binary restart layout (all little-endian):
///
///     "FBRS"  u32 version
///     repeated: 4-byte tag, u64 payload length, payload
///     tags: BOX_ STAT MASS ATOM PAIR (optional) END_
///
/// END_ has an empty payload and must be last.
inline constexpr std::string_view restart_magic = "FBRS";
inline constexpr std::uint32_t restart_version = 1;

std::string write_restart(const SystemState& state);
/// Throws CorruptRestart on any magic, version, tag or length mismatch. The
/// bound style is created through `styles`.
SystemState read_restart(std::string_view bytes, const StyleRegistry& styles);

/// Text data file with `Masses`, `Atoms` and `Velocities` sections, reals
/// at 17 significant digits.
std::string write_data(const SystemState& state);
/// Replaces box, types, masses and atoms of `state`; keeps its settings.
/// Throws E-PARSE with line and caret.
void read_data(std::string_view text, SystemState& state, const std::string& origin = "data file");

}  // namespace mdlite

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mdlite/system.h"

namespace mdlite {

struct Neighbor {
  std::uint32_t j = 0;
  /// Periodic image of j, in box lengths, that is closest to i at build time.
  std::array<std::int8_t, 3> image{0, 0, 0};
};

/// Per-atom neighbor lists. Half mode stores each unordered pair within
/// cutoff + skin once (under the lower index), full mode under both atoms.
struct NeighborList {
  NeighborMode mode = NeighborMode::half;
  double cutoff = 0.0;
  double skin = 0.0;
  std::vector<std::vector<Neighbor>> neighbors;
  /// Positions at build time, for the rebuild criterion.
  std::vector<Vec3> x_at_build;

  std::size_t pair_count() const;
};

/// Cell-binned construction with cell edge >= cutoff + skin. Throws
/// E-BOX-TOO-SMALL when a periodic box length is below 2 (cutoff + skin).
NeighborList build_neighbor_list(const SystemState& state, NeighborMode mode, double cutoff, double skin);

/// True when some atom moved more than skin / 2 since the list was built.
bool needs_rebuild(const SystemState& state, const NeighborList& list);

}  // namespace mdlite

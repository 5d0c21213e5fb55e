#include "mdlite/neighbor.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mdlite {

std::size_t NeighborList::pair_count() const {
  std::size_t n = 0;
  for (const auto& row : neighbors) n += row.size();
  return n;
}

NeighborList build_neighbor_list(const SystemState& state, NeighborMode mode, double cutoff, double skin) {
  const SimBox& box = state.require_box();
  if (!(cutoff > 0.0)) throw EngineError(codes::bad_argument, "neighbor cutoff must be positive");
  if (skin < 0.0) throw EngineError(codes::bad_argument, "neighbor skin must not be negative");
  const double range = cutoff + skin;
  for (int d = 0; d < 3; ++d) {
    if (box.periodic[d] && box.length(d) < 2.0 * range) {
      throw EngineError(codes::box_too_small,
                        fmt::format("box length {} along {} is smaller than 2 x (cutoff + skin) = {}",
                                    box.length(d), "xyz"[d], 2.0 * range));
    }
  }

  const std::size_t n = state.natoms();
  NeighborList list;
  list.mode = mode;
  list.cutoff = cutoff;
  list.skin = skin;
  list.neighbors.assign(n, {});
  list.x_at_build = state.x;

  std::array<int, 3> ncell{};
  for (int d = 0; d < 3; ++d) ncell[d] = std::max(1, static_cast<int>(std::floor(box.length(d) / range)));
  auto cell_coord = [&](const Vec3& x, int d) {
    int c = static_cast<int>(std::floor((x[d] - box.lo[d]) / box.length(d) * ncell[d]));
    return std::clamp(c, 0, ncell[d] - 1);
  };
  auto cell_index = [&](int cx, int cy, int cz) { return (cz * ncell[1] + cy) * ncell[0] + cx; };

  const std::size_t total_cells = static_cast<std::size_t>(ncell[0]) * ncell[1] * ncell[2];
  std::vector<std::vector<std::uint32_t>> bins(total_cells);
  std::vector<std::array<int, 3>> atom_cell(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d) atom_cell[i][d] = cell_coord(state.x[i], d);
    bins[cell_index(atom_cell[i][0], atom_cell[i][1], atom_cell[i][2])].push_back(static_cast<std::uint32_t>(i));
  }

  const double range_sq = range * range;
  std::vector<int> stencil;
  for (std::size_t i = 0; i < n; ++i) {
    stencil.clear();
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          std::array<int, 3> c{atom_cell[i][0] + dx, atom_cell[i][1] + dy, atom_cell[i][2] + dz};
          bool valid = true;
          for (int d = 0; d < 3; ++d) {
            if (c[d] < 0 || c[d] >= ncell[d]) {
              if (!box.periodic[d]) {
                valid = false;
                break;
              }
              c[d] = (c[d] + ncell[d]) % ncell[d];
            }
          }
          if (valid) stencil.push_back(cell_index(c[0], c[1], c[2]));
        }
      }
    }
    // small cell counts make stencil entries alias
    std::sort(stencil.begin(), stencil.end());
    stencil.erase(std::unique(stencil.begin(), stencil.end()), stencil.end());

    for (int c : stencil) {
      for (std::uint32_t j : bins[c]) {
        if (j == i) continue;
        if (mode == NeighborMode::half && j < i) continue;
        Vec3 del{state.x[i][0] - state.x[j][0], state.x[i][1] - state.x[j][1], state.x[i][2] - state.x[j][2]};
        Vec3 raw = del;
        box.minimum_image(del);
        const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
        if (rsq >= range_sq) continue;
        Neighbor nb;
        nb.j = j;
        for (int d = 0; d < 3; ++d) {
          if (box.periodic[d]) nb.image[d] = static_cast<std::int8_t>(std::lround((raw[d] - del[d]) / box.length(d)));
        }
        list.neighbors[i].push_back(nb);
      }
    }
    std::sort(list.neighbors[i].begin(), list.neighbors[i].end(),
              [](const Neighbor& a, const Neighbor& b) { return a.j < b.j; });
  }
  return list;
}

bool needs_rebuild(const SystemState& state, const NeighborList& list) {
  if (list.x_at_build.size() != state.natoms()) return true;
  const SimBox& box = state.require_box();
  const double limit = 0.5 * list.skin;
  const double limit_sq = limit * limit;
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    Vec3 del{state.x[i][0] - list.x_at_build[i][0], state.x[i][1] - list.x_at_build[i][1],
             state.x[i][2] - list.x_at_build[i][2]};
    box.minimum_image(del);
    if (del[0] * del[0] + del[1] * del[1] + del[2] * del[2] > limit_sq) return true;
  }
  return false;
}

}  // namespace mdlite

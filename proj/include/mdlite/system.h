#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mdlite/pair_style.h"

namespace mdlite {

using Vec3 = std::array<double, 3>;

/// Orthogonal box [lo, hi) per dimension, reduced LJ units.
struct SimBox {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};
  std::array<bool, 3> periodic{true, true, true};

  double length(int d) const { return hi[d] - lo[d]; }
  double volume() const { return length(0) * length(1) * length(2); }
  /// Minimum-image displacement along periodic dimensions.
  void minimum_image(Vec3& dx) const;
  /// Maps a position back into [lo, hi) along periodic dimensions.
  void wrap(Vec3& x) const;
};

enum class NeighborMode { half, full };
enum class Units { lj };

/// The complete state of one simulation. Copyable: the bound pair style is
/// cloned.
struct SystemState {
  std::optional<SimBox> box;
  std::array<bool, 3> periodic{true, true, true};
  int ntypes = 0;
  /// Index 0 unused.
  std::vector<double> mass;

  std::vector<std::int64_t> id;
  std::vector<int> type;
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  std::vector<Vec3> f;

  std::unique_ptr<PairStyle> pair;

  Units units = Units::lj;
  double dt = 0.005;
  std::int64_t step = 0;
  std::uint64_t rng_seed = 0;
  int thermo_every = 0;
  double skin = 0.3;
  NeighborMode neigh_mode = NeighborMode::half;
  /// Fix id of the active `nve` integrator; empty when none.
  std::string nve_fix;

  SystemState() = default;
  SystemState(const SystemState& other);
  SystemState& operator=(const SystemState& other);
  SystemState(SystemState&&) noexcept = default;
  SystemState& operator=(SystemState&&) noexcept = default;

  std::size_t natoms() const { return x.size(); }
  void add_atom(std::int64_t atom_id, int atom_type, const Vec3& pos, const Vec3& vel = {0.0, 0.0, 0.0});
  /// Removes atoms, box and style but keeps the settings.
  void clear_system();
  /// Throws E-NO-BOX.
  const SimBox& require_box() const;
  /// Throws E-NO-STYLE.
  PairStyle& require_pair() const;
  /// Atom indices sorted by id.
  std::vector<std::size_t> id_order() const;
};

}  // namespace mdlite

#include "mdlite/system.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdlite {

void SimBox::minimum_image(Vec3& dx) const {
  for (int d = 0; d < 3; ++d) {
    if (!periodic[d]) continue;
    const double len = length(d);
    dx[d] -= len * std::round(dx[d] / len);
  }
}

void SimBox::wrap(Vec3& x) const {
  for (int d = 0; d < 3; ++d) {
    if (!periodic[d]) continue;
    const double len = length(d);
    if (x[d] < lo[d] || x[d] >= hi[d]) {
      x[d] -= len * std::floor((x[d] - lo[d]) / len);
      // rounding can land exactly on hi
      if (x[d] >= hi[d]) x[d] = lo[d];
      if (x[d] < lo[d]) x[d] = lo[d];
    }
  }
}

SystemState::SystemState(const SystemState& other)
    : box(other.box),
      periodic(other.periodic),
      ntypes(other.ntypes),
      mass(other.mass),
      id(other.id),
      type(other.type),
      x(other.x),
      v(other.v),
      f(other.f),
      pair(other.pair ? other.pair->clone() : nullptr),
      units(other.units),
      dt(other.dt),
      step(other.step),
      rng_seed(other.rng_seed),
      thermo_every(other.thermo_every),
      skin(other.skin),
      neigh_mode(other.neigh_mode),
      nve_fix(other.nve_fix) {}

SystemState& SystemState::operator=(const SystemState& other) {
  if (this != &other) {
    SystemState copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void SystemState::add_atom(std::int64_t atom_id, int atom_type, const Vec3& pos, const Vec3& vel) {
  id.push_back(atom_id);
  type.push_back(atom_type);
  x.push_back(pos);
  v.push_back(vel);
  f.push_back({0.0, 0.0, 0.0});
}

void SystemState::clear_system() {
  box.reset();
  ntypes = 0;
  mass.clear();
  id.clear();
  type.clear();
  x.clear();
  v.clear();
  f.clear();
  pair.reset();
  step = 0;
}

const SimBox& SystemState::require_box() const {
  if (!box) throw EngineError(codes::no_box, "no simulation box has been defined");
  return *box;
}

PairStyle& SystemState::require_pair() const {
  if (!pair) throw EngineError(codes::no_style, "no pair style has been defined");
  return *pair;
}

std::vector<std::size_t> SystemState::id_order() const {
  std::vector<std::size_t> order(id.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return id[a] < id[b]; });
  return order;
}

}  // namespace mdlite

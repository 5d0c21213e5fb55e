#include "mdlite/pair_style.h"

#include <fmt/format.h>

#include "mdlite/neighbor.h"
#include "mdlite/pair_styles.h"
#include "mdlite/system.h"

namespace mdlite {

void PairStyle::set_shift(bool) {
  throw EngineError(codes::unsupported, fmt::format("pair style {} does not support energy shifting", name_));
}

PairTerm PairStyle::single(int ti, int tj, double rsq) const {
  if (!has_single()) {
    throw EngineError(codes::unsupported, fmt::format("pair style {} does not support single()", name_));
  }
  return eval(ti, tj, rsq);
}

ForceResult PairStyle::compute(SystemState& state, const NeighborList& list) const {
  const SimBox& box = state.require_box();
  const bool half = list.mode == NeighborMode::half;
  const double weight = half ? 1.0 : 0.5;
  for (auto& f : state.f) f = {0.0, 0.0, 0.0};

  ForceResult out;
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    const Vec3& xi = state.x[i];
    const int ti = state.type[i];
    Vec3 fi{0.0, 0.0, 0.0};
    for (const Neighbor& nb : list.neighbors[i]) {
      const std::size_t j = nb.j;
      Vec3 del{xi[0] - state.x[j][0], xi[1] - state.x[j][1], xi[2] - state.x[j][2]};
      box.minimum_image(del);
      const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
      const int tj = state.type[j];
      if (rsq >= cutsq(ti, tj)) continue;
      const PairTerm t = eval(ti, tj, rsq);
      for (int d = 0; d < 3; ++d) fi[d] += del[d] * t.fpair;
      if (half) {
        for (int d = 0; d < 3; ++d) state.f[j][d] -= del[d] * t.fpair;
      }
      out.energy += weight * t.energy;
      out.virial[0] += weight * del[0] * del[0] * t.fpair;
      out.virial[1] += weight * del[1] * del[1] * t.fpair;
      out.virial[2] += weight * del[2] * del[2] * t.fpair;
      out.virial[3] += weight * del[0] * del[1] * t.fpair;
      out.virial[4] += weight * del[0] * del[2] * t.fpair;
      out.virial[5] += weight * del[1] * del[2] * t.fpair;
    }
    for (int d = 0; d < 3; ++d) state.f[i][d] += fi[d];
  }
  return out;
}

void StyleRegistry::register_style(StyleInfo info) {
  if (styles_.count(info.name)) {
    throw EngineError(codes::duplicate_style, fmt::format("pair style {} is already registered", info.name));
  }
  std::string key = info.name;
  styles_.emplace(std::move(key), std::move(info));
}

const StyleInfo* StyleRegistry::find(std::string_view name) const {
  auto it = styles_.find(name);
  return it == styles_.end() ? nullptr : &it->second;
}

std::unique_ptr<PairStyle> StyleRegistry::create(std::string_view name) const {
  const StyleInfo* info = find(name);
  if (!info) throw EngineError(codes::unknown_style, fmt::format("unknown pair style {}", name));
  return info->factory();
}

std::vector<const StyleInfo*> StyleRegistry::list() const {
  std::vector<const StyleInfo*> out;
  for (const auto& [name, info] : styles_) out.push_back(&info);
  return out;
}

std::optional<std::string> StyleRegistry::style_for_unit(std::string_view unit) const {
  for (const auto& [name, info] : styles_) {
    if (info.source_unit == unit) return name;
  }
  return std::nullopt;
}

const StyleRegistry& builtin_styles() {
  static const StyleRegistry registry = [] {
    StyleRegistry r;
    r.register_style({"lj/cut", [] { return make_lj_cut(); }, true, "pair/lj_cut",
                      "12-6 Lennard-Jones with a cutoff"});
    r.register_style({"lj/cut/unrolled", [] { return make_lj_cut_unrolled(); }, true, "pair/lj_cut_unrolled",
                      "lj/cut with a 4-way unrolled neighbor loop"});
    r.register_style({"morse", [] { return make_morse(); }, true, "pair/morse", "Morse potential with a cutoff"});
    r.register_style({"table", [] { return make_table(); }, false, "pair/table",
                      "linear interpolation in r^2 of tabulated energies and forces"});
    return r;
  }();
  return registry;
}

}  // namespace mdlite

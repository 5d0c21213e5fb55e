#include "mdlite/md.h"

#include <cmath>

#include <fmt/format.h>

#include "mdlite/utils.h"

namespace mdlite {

ForceResult compute_forces(SystemState& state, const NeighborList& list) {
  const PairStyle& pair = state.require_pair();
  return pair.compute(state, list);
}

ForceResult compute_forces(SystemState& state) {
  PairStyle& pair = state.require_pair();
  pair.init(state.ntypes);
  NeighborList list = build_neighbor_list(state, state.neigh_mode, pair.cutoff(), state.skin);
  return pair.compute(state, list);
}

double kinetic_energy(const SystemState& state) {
  double ke = 0.0;
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    const Vec3& v = state.v[i];
    ke += state.mass[state.type[i]] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return 0.5 * ke;
}

double temperature(const SystemState& state) {
  const double dof = 3.0 * static_cast<double>(state.natoms()) - 3.0;
  if (dof <= 0.0) return 0.0;
  return 2.0 * kinetic_energy(state) / dof;
}

ThermoSample make_sample(const SystemState& state, const ForceResult& forces) {
  ThermoSample s;
  s.step = state.step;
  s.kinetic_energy = kinetic_energy(state);
  const double dof = 3.0 * static_cast<double>(state.natoms()) - 3.0;
  s.temperature = dof > 0.0 ? 2.0 * s.kinetic_energy / dof : 0.0;
  s.potential_energy = forces.energy;
  s.total_energy = s.potential_energy + s.kinetic_energy;
  s.virial = forces.virial;
  const double volume = state.require_box().volume();
  s.pressure = (2.0 * s.kinetic_energy + forces.virial[0] + forces.virial[1] + forces.virial[2]) / (3.0 * volume);
  return s;
}

std::string format_thermo_row(const ThermoSample& s) {
  return fmt::format("{} {} {} {} {} {}", s.step, utils::format_thermo(s.temperature),
                     utils::format_thermo(s.potential_energy), utils::format_thermo(s.kinetic_energy),
                     utils::format_thermo(s.total_energy), utils::format_thermo(s.pressure));
}

namespace {

void check_run_preconditions(const SystemState& state, std::int64_t n) {
  state.require_box();
  state.require_pair();
  if (n < 0) throw EngineError(codes::bad_argument, "number of steps must not be negative");
  if (!(state.dt > 0.0)) throw EngineError(codes::bad_argument, "timestep must be positive");
  if (state.nve_fix.empty()) throw EngineError(codes::no_integrator, "no time integration fix is defined");
}

void half_kick(SystemState& state) {
  const double half_dt = 0.5 * state.dt;
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    const double scale = half_dt / state.mass[state.type[i]];
    for (int d = 0; d < 3; ++d) state.v[i][d] += scale * state.f[i][d];
  }
}

void drift(SystemState& state) {
  const SimBox& box = *state.box;
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    for (int d = 0; d < 3; ++d) state.x[i][d] += state.dt * state.v[i][d];
    box.wrap(state.x[i]);
  }
}

bool sample_due(std::int64_t step, std::int64_t last_step, int thermo_every) {
  return step == last_step || (thermo_every > 0 && step % thermo_every == 0);
}

/// Shared velocity-Verlet loop; `forces` recomputes `state.f`.
template <class ForceFn>
std::vector<ThermoSample> integrate(SystemState& state, std::int64_t n, int thermo_every,
                                    const ThermoCallback& on_sample, ForceFn&& forces) {
  std::vector<ThermoSample> samples;
  auto emit = [&](const ForceResult& fr) {
    samples.push_back(make_sample(state, fr));
    if (on_sample) on_sample(samples.back());
  };

  ForceResult fr = forces();
  emit(fr);
  const std::int64_t last = state.step + n;
  for (std::int64_t k = 0; k < n; ++k) {
    half_kick(state);
    drift(state);
    ++state.step;
    fr = forces();
    half_kick(state);
    if (sample_due(state.step, last, thermo_every)) emit(fr);
  }
  return samples;
}

}  // namespace

std::vector<ThermoSample> run_steps(SystemState& state, std::int64_t n, int thermo_every,
                                    const ThermoCallback& on_sample) {
  check_run_preconditions(state, n);
  PairStyle& pair = *state.pair;
  pair.init(state.ntypes);
  NeighborList list = build_neighbor_list(state, state.neigh_mode, pair.cutoff(), state.skin);
  return integrate(state, n, thermo_every, on_sample, [&]() {
    if (needs_rebuild(state, list)) list = build_neighbor_list(state, state.neigh_mode, pair.cutoff(), state.skin);
    return pair.compute(state, list);
  });
}

namespace {

struct Ghost {
  Vec3 x;
  int type;
};

void check_decomposition(const SystemState& state, const std::array<int, 3>& grid, double cutoff) {
  const SimBox& box = state.require_box();
  const double range = cutoff + state.skin;
  for (int d = 0; d < 3; ++d) {
    if (grid[d] < 1) throw EngineError(codes::bad_argument, "decomposition grid entries must be >= 1");
    if (box.periodic[d] && box.length(d) < 2.0 * range) {
      throw EngineError(codes::box_too_small,
                        fmt::format("box length {} along {} is smaller than 2 x (cutoff + skin) = {}",
                                    box.length(d), "xyz"[d], 2.0 * range));
    }
    const double sub = box.length(d) / grid[d];
    if (sub < range) {
      throw EngineError(codes::box_too_small,
                        fmt::format("sub-domain length {} along {} is smaller than cutoff + skin = {}", sub,
                                    "xyz"[d], range));
    }
  }
}

}  // namespace

ForceResult compute_forces_decomposed(SystemState& state, std::array<int, 3> grid) {
  PairStyle& pair = state.require_pair();
  pair.init(state.ntypes);
  const double cutoff = pair.cutoff();
  check_decomposition(state, grid, cutoff);
  const SimBox& box = *state.box;
  const std::size_t n = state.natoms();

  Vec3 sub{};
  for (int d = 0; d < 3; ++d) sub[d] = box.length(d) / grid[d];
  auto domain_of = [&](const Vec3& x) {
    std::array<int, 3> c{};
    for (int d = 0; d < 3; ++d) {
      c[d] = std::clamp(static_cast<int>(std::floor((x[d] - box.lo[d]) / sub[d])), 0, grid[d] - 1);
    }
    return c;
  };
  std::vector<std::array<int, 3>> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = domain_of(state.x[i]);

  for (auto& f : state.f) f = {0.0, 0.0, 0.0};
  ForceResult total;

  std::vector<std::size_t> owned;
  std::vector<Ghost> ghosts;
  for (int gz = 0; gz < grid[2]; ++gz) {
    for (int gy = 0; gy < grid[1]; ++gy) {
      for (int gx = 0; gx < grid[0]; ++gx) {
        const std::array<int, 3> here{gx, gy, gz};
        Vec3 lo{}, hi{};
        for (int d = 0; d < 3; ++d) {
          lo[d] = box.lo[d] + here[d] * sub[d];
          hi[d] = here[d] == grid[d] - 1 ? box.hi[d] : box.lo[d] + (here[d] + 1) * sub[d];
        }

        owned.clear();
        for (std::size_t i = 0; i < n; ++i) {
          if (owner[i] == here) owned.push_back(i);
        }

        // ghost exchange: copies of every atom image within `cutoff` of the
        // sub-domain that this domain does not own
        ghosts.clear();
        for (std::size_t j = 0; j < n; ++j) {
          for (int sz = -1; sz <= 1; ++sz) {
            if (sz != 0 && !box.periodic[2]) continue;
            for (int sy = -1; sy <= 1; ++sy) {
              if (sy != 0 && !box.periodic[1]) continue;
              for (int sx = -1; sx <= 1; ++sx) {
                if (sx != 0 && !box.periodic[0]) continue;
                if (sx == 0 && sy == 0 && sz == 0 && owner[j] == here) continue;
                const Vec3 p{state.x[j][0] + sx * box.length(0), state.x[j][1] + sy * box.length(1),
                             state.x[j][2] + sz * box.length(2)};
                bool inside = true;
                for (int d = 0; d < 3 && inside; ++d) inside = p[d] >= lo[d] - cutoff && p[d] < hi[d] + cutoff;
                if (inside) ghosts.push_back({p, state.type[j]});
              }
            }
          }
        }

        ForceResult local;
        auto tally = [&](const Vec3& del, const PairTerm& t, double weight) {
          local.energy += weight * t.energy;
          local.virial[0] += weight * del[0] * del[0] * t.fpair;
          local.virial[1] += weight * del[1] * del[1] * t.fpair;
          local.virial[2] += weight * del[2] * del[2] * t.fpair;
          local.virial[3] += weight * del[0] * del[1] * t.fpair;
          local.virial[4] += weight * del[0] * del[2] * t.fpair;
          local.virial[5] += weight * del[1] * del[2] * t.fpair;
        };

        for (std::size_t a = 0; a < owned.size(); ++a) {
          const std::size_t i = owned[a];
          const Vec3& xi = state.x[i];
          const int ti = state.type[i];
          for (std::size_t b = a + 1; b < owned.size(); ++b) {
            const std::size_t j = owned[b];
            const Vec3 del{xi[0] - state.x[j][0], xi[1] - state.x[j][1], xi[2] - state.x[j][2]};
            const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
            const int tj = state.type[j];
            if (rsq >= pair.cutsq(ti, tj)) continue;
            const PairTerm t = pair.eval(ti, tj, rsq);
            for (int d = 0; d < 3; ++d) {
              state.f[i][d] += del[d] * t.fpair;
              state.f[j][d] -= del[d] * t.fpair;
            }
            tally(del, t, 1.0);
          }
          for (const Ghost& g : ghosts) {
            const Vec3 del{xi[0] - g.x[0], xi[1] - g.x[1], xi[2] - g.x[2]};
            const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
            if (rsq >= pair.cutsq(ti, g.type)) continue;
            const PairTerm t = pair.eval(ti, g.type, rsq);
            for (int d = 0; d < 3; ++d) state.f[i][d] += del[d] * t.fpair;
            tally(del, t, 0.5);
          }
        }

        total.energy += local.energy;
        for (int k = 0; k < 6; ++k) total.virial[k] += local.virial[k];
      }
    }
  }
  return total;
}

std::vector<ThermoSample> decomposed_run(SystemState& state, std::int64_t n, std::array<int, 3> grid,
                                         int thermo_every, const ThermoCallback& on_sample) {
  if (grid == std::array<int, 3>{1, 1, 1}) return run_steps(state, n, thermo_every, on_sample);
  check_run_preconditions(state, n);
  state.pair->init(state.ntypes);
  check_decomposition(state, grid, state.pair->cutoff());
  return integrate(state, n, thermo_every, on_sample, [&]() { return compute_forces_decomposed(state, grid); });
}

}  // namespace mdlite

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mdlite/neighbor.h"
#include "mdlite/system.h"

namespace mdlite {

struct ThermoSample {
  std::int64_t step = 0;
  double temperature = 0.0;
  double potential_energy = 0.0;
  double kinetic_energy = 0.0;
  double total_energy = 0.0;
  double pressure = 0.0;
  std::array<double, 6> virial{};
};

/// Column header of thermo output and reference logs.
inline constexpr const char* thermo_header = "Step Temp PotEng KinEng TotEng Press";

/// Overwrites `state.f`. Throws E-NO-STYLE when no pair style is bound.
ForceResult compute_forces(SystemState& state, const NeighborList& list);

/// Builds a list for the bound style with the state's skin and mode, then
/// computes forces.
ForceResult compute_forces(SystemState& state);

double kinetic_energy(const SystemState& state);
/// 2 KE / (3N - 3); zero when N < 2.
double temperature(const SystemState& state);
ThermoSample make_sample(const SystemState& state, const ForceResult& forces);
/// One row: integer step, reals with 15 significant digits.
std::string format_thermo_row(const ThermoSample& s);

using ThermoCallback = std::function<void(const ThermoSample&)>;

/// Velocity-Verlet for `n` steps with the list rebuilt on the skin / 2
/// criterion. Samples at the starting step, at every multiple of
/// `thermo_every` and at the final step. Requires an active nve fix.
std::vector<ThermoSample> run_steps(SystemState& state, std::int64_t n, int thermo_every,
                                    const ThermoCallback& on_sample = {});

/// Same integration, but forces come from a spatial decomposition into
/// `grid` sub-domains, each processed with its own ghost copies in fixed
/// grid order. A 1x1x1 grid delegates to run_steps.
std::vector<ThermoSample> decomposed_run(SystemState& state, std::int64_t n, std::array<int, 3> grid,
                                         int thermo_every, const ThermoCallback& on_sample = {});

/// One decomposed force evaluation; exposed for tests.
ForceResult compute_forces_decomposed(SystemState& state, std::array<int, 3> grid);

}  // namespace mdlite

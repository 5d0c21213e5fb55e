// Built-in input commands. Each handler receives the arguments after the
// command word; argument errors point at the offending token.

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "mdlite/engine.h"
#include "mdlite/persist.h"
#include "mdlite/random.h"
#include "mdlite/utils.h"

namespace mdlite {

namespace {

void cmd_units(Engine& e, const Args& a) {
  if (a.word(0) != "lj") a.fail(0, codes::bad_argument, fmt::format("unsupported units '{}'; only 'lj' is available", a.word(0)));
  e.state().units = Units::lj;
}

void cmd_boundary(Engine& e, const Args& a) {
  if (e.state().box) a.fail_command(codes::box_exists, "boundary must be set before the box is created");
  for (int d = 0; d < 3; ++d) {
    const std::string& w = a.word(d);
    if (w == "p") {
      e.state().periodic[d] = true;
    } else if (w == "f") {
      e.state().periodic[d] = false;
    } else {
      a.fail(d, codes::bad_argument, fmt::format("expected 'p' or 'f' but found '{}'", w));
    }
  }
}

void cmd_region(Engine& e, const Args& a) {
  if (a.word(1) != "block") a.fail(1, codes::unsupported, fmt::format("unsupported region style '{}'", a.word(1)));
  Engine::Region r{};
  for (int d = 0; d < 3; ++d) {
    r.lo[d] = a.real(2 + 2 * d, "lower bound");
    r.hi[d] = a.real(3 + 2 * d, "upper bound");
    if (!(r.hi[d] > r.lo[d])) a.fail(3 + 2 * d, codes::bad_argument, "upper bound must exceed lower bound");
  }
  e.regions()[a.word(0)] = r;
}

void cmd_create_box(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (s.box) a.fail_command(codes::box_exists, "a simulation box already exists");
  const std::int64_t ntypes = a.integer(0, "number of atom types");
  if (ntypes < 1 || ntypes > 1000) a.fail(0, codes::bad_argument, "number of atom types must be in 1..1000");
  auto it = e.regions().find(a.word(1));
  if (it == e.regions().end()) a.fail(1, codes::bad_argument, fmt::format("unknown region '{}'", a.word(1)));
  SimBox box;
  box.lo = it->second.lo;
  box.hi = it->second.hi;
  box.periodic = s.periodic;
  s.box = box;
  s.ntypes = static_cast<int>(ntypes);
  s.mass.assign(static_cast<std::size_t>(ntypes) + 1, 1.0);
}

/// create_atoms <type> sc <spacing> [jitter <amplitude> <seed>]
void cmd_create_atoms(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (!s.box) a.fail_command(codes::no_box, "create_atoms requires a simulation box");
  const std::int64_t type = a.integer(0, "atom type");
  if (type < 1 || type > s.ntypes) a.fail(0, codes::bad_argument, fmt::format("atom type {} is outside 1..{}", type, s.ntypes));
  if (a.word(1) != "sc") a.fail(1, codes::unsupported, fmt::format("unsupported lattice '{}'; only 'sc' is available", a.word(1)));
  const double spacing = a.positive_real(2, "lattice spacing");
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  if (a.size() > 3) {
    if (a.word(3) != "jitter") a.fail(3, codes::bad_argument, fmt::format("unknown keyword '{}'", a.word(3)));
    if (a.size() != 6) a.fail_command(codes::arg_count, "usage: create_atoms <type> sc <spacing> jitter <amplitude> <seed>");
    amplitude = a.nonnegative_real(4, "jitter amplitude");
    const std::int64_t sd = a.integer(5, "seed");
    if (sd < 0) a.fail(5, codes::bad_argument, "seed must not be negative");
    seed = static_cast<std::uint64_t>(sd);
  }

  const SimBox& box = *s.box;
  std::array<std::int64_t, 3> count{};
  for (int d = 0; d < 3; ++d) {
    count[d] = static_cast<std::int64_t>(std::floor(box.length(d) / spacing + 1e-9));
    if (count[d] < 1) a.fail(2, codes::bad_argument, "lattice spacing exceeds the box");
  }
  if (count[0] * count[1] * count[2] > 1000000) a.fail(2, codes::bad_argument, "lattice would create too many atoms");

  std::int64_t next_id = 1;
  for (std::int64_t id : s.id) next_id = std::max(next_id, id + 1);
  SplitMix64 rng(seed);
  for (std::int64_t k = 0; k < count[2]; ++k) {
    for (std::int64_t j = 0; j < count[1]; ++j) {
      for (std::int64_t i = 0; i < count[0]; ++i) {
        Vec3 x{box.lo[0] + i * spacing, box.lo[1] + j * spacing, box.lo[2] + k * spacing};
        if (amplitude > 0.0) {
          for (int d = 0; d < 3; ++d) x[d] += amplitude * (2.0 * rng.uniform() - 1.0);
        }
        box.wrap(x);
        s.add_atom(next_id++, static_cast<int>(type), x);
      }
    }
  }
}

void cmd_read_data(Engine& e, const Args& a) {
  if (e.state().box) a.fail_command(codes::box_exists, "read_data requires that no box exists yet");
  const std::string path = e.resolve_path(a.word(0));
  std::string text;
  try {
    text = utils::read_file(path);
  } catch (const std::exception& ex) {
    a.fail(0, codes::io_failure, ex.what());
  }
  read_data(text, e.state(), path);
}

void cmd_write_data(Engine& e, const Args& a) {
  const std::string text = write_data(e.state());
  std::ofstream out(e.resolve_path(a.word(0)), std::ios::binary);
  if (!out) a.fail(0, codes::io_failure, fmt::format("cannot write '{}'", a.word(0)));
  out << text;
}

void cmd_write_restart(Engine& e, const Args& a) {
  const std::string bytes = write_restart(e.state());
  std::ofstream out(e.resolve_path(a.word(0)), std::ios::binary);
  if (!out) a.fail(0, codes::io_failure, fmt::format("cannot write '{}'", a.word(0)));
  out << bytes;
}

void cmd_read_restart(Engine& e, const Args& a) {
  if (e.state().box) a.fail_command(codes::box_exists, "read_restart requires that no box exists yet");
  std::string bytes;
  try {
    bytes = utils::read_file(e.resolve_path(a.word(0)));
  } catch (const std::exception& ex) {
    a.fail(0, codes::io_failure, ex.what());
  }
  e.state() = read_restart(bytes, e.styles());
}

void cmd_mass(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (!s.box) a.fail_command(codes::no_box, "mass requires a simulation box");
  const auto [lo, hi] = a.type_range(0, s.ntypes, "atom type");
  const double m = a.positive_real(1, "mass");
  for (int t = lo; t <= hi; ++t) s.mass[t] = m;
}

void cmd_pair_style(Engine& e, const Args& a) {
  const StyleInfo* info = e.styles().find(a.word(0));
  if (!info) a.fail(0, codes::unknown_style, fmt::format("unknown pair style '{}'", a.word(0)));
  std::unique_ptr<PairStyle> style = info->factory();
  style->settings(a.tail(1));
  e.state().pair = std::move(style);
}

void cmd_pair_coeff(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (!s.pair) a.fail_command(codes::no_style, "pair_coeff requires a pair style");
  if (!s.box) a.fail_command(codes::no_box, "pair_coeff requires a simulation box");
  s.pair->coeff(a, s.ntypes, e.pair_context());
}

void cmd_pair_modify(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (!s.pair) a.fail_command(codes::no_style, "pair_modify requires a pair style");
  if (a.word(0) != "shift") a.fail(0, codes::bad_argument, fmt::format("unknown pair_modify keyword '{}'", a.word(0)));
  try {
    s.pair->set_shift(a.yes_no(1, "shift"));
  } catch (EngineError& err) {
    if (!err.caret()) err.with_caret(a.token(0).span());
    throw;
  }
}

void cmd_neighbor(Engine& e, const Args& a) {
  e.state().skin = a.nonnegative_real(0, "skin");
  if (a.size() == 2) {
    if (a.word(1) == "half") {
      e.state().neigh_mode = NeighborMode::half;
    } else if (a.word(1) == "full") {
      e.state().neigh_mode = NeighborMode::full;
    } else {
      a.fail(1, codes::bad_argument, fmt::format("expected 'half' or 'full' but found '{}'", a.word(1)));
    }
  }
}

/// velocity all create <temperature> <seed> | velocity all set <vx> <vy> <vz>
void cmd_velocity(Engine& e, const Args& a) {
  SystemState& s = e.state();
  if (a.word(0) != "all") a.fail(0, codes::unsupported, "only group 'all' is available");
  if (a.word(1) == "set") {
    a.expect_count(5, 5, "velocity all set <vx> <vy> <vz>");
    const Vec3 v{a.real(2, "vx"), a.real(3, "vy"), a.real(4, "vz")};
    for (auto& vi : s.v) vi = v;
    return;
  }
  if (a.word(1) != "create") a.fail(1, codes::bad_argument, fmt::format("expected 'create' or 'set' but found '{}'", a.word(1)));
  a.expect_count(4, 4, "velocity all create <temperature> <seed>");
  const double target = a.nonnegative_real(2, "temperature");
  const std::int64_t seed = a.integer(3, "seed");
  if (seed < 0) a.fail(3, codes::bad_argument, "seed must not be negative");
  if (s.natoms() < 2) a.fail_command(codes::bad_argument, "velocity create needs at least two atoms");

  s.rng_seed = static_cast<std::uint64_t>(seed);
  SplitMix64 rng(s.rng_seed);
  for (std::size_t i : s.id_order()) {
    for (int d = 0; d < 3; ++d) s.v[i][d] = rng.uniform() - 0.5;
  }
  Vec3 momentum{0.0, 0.0, 0.0};
  double total_mass = 0.0;
  for (std::size_t i = 0; i < s.natoms(); ++i) {
    const double m = s.mass[s.type[i]];
    total_mass += m;
    for (int d = 0; d < 3; ++d) momentum[d] += m * s.v[i][d];
  }
  for (auto& v : s.v) {
    for (int d = 0; d < 3; ++d) v[d] -= momentum[d] / total_mass;
  }
  const double current = temperature(s);
  const double scale = current > 0.0 ? std::sqrt(target / current) : 0.0;
  for (auto& v : s.v) {
    for (int d = 0; d < 3; ++d) v[d] *= scale;
  }
}

void cmd_fix(Engine& e, const Args& a) {
  if (a.word(1) != "all") a.fail(1, codes::unsupported, "only group 'all' is available");
  if (a.word(2) != "nve") a.fail(2, codes::unsupported, fmt::format("unsupported fix style '{}'", a.word(2)));
  e.state().nve_fix = a.word(0);
}

void cmd_unfix(Engine& e, const Args& a) {
  if (e.state().nve_fix != a.word(0)) a.fail(0, codes::bad_argument, fmt::format("no fix with id '{}'", a.word(0)));
  e.state().nve_fix.clear();
}

void cmd_timestep(Engine& e, const Args& a) { e.state().dt = a.positive_real(0, "timestep"); }

void cmd_thermo(Engine& e, const Args& a) {
  const std::int64_t n = a.integer(0, "thermo interval");
  if (n < 0) a.fail(0, codes::bad_argument, "thermo interval must not be negative");
  e.state().thermo_every = static_cast<int>(n);
}

void cmd_run(Engine& e, const Args& a) {
  const std::int64_t n = a.integer(0, "number of steps");
  if (n < 0) a.fail(0, codes::bad_argument, "number of steps must not be negative");
  e.run(n);
}

void cmd_print(Engine& e, const Args& a) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < a.size(); ++i) words.push_back(a.word(i));
  e.print(utils::join(words));
}

void cmd_variable(Engine& e, const Args& a) {
  if (a.word(1) != "string") a.fail(1, codes::unsupported, fmt::format("unsupported variable style '{}'", a.word(1)));
  e.variables()[a.word(0)] = a.word(2);
}

void cmd_plugin(Engine& e, const Args& a) {
  if (a.word(0) != "load") a.fail(0, codes::bad_argument, fmt::format("unknown plugin action '{}'", a.word(0)));
  try {
    e.load_plugin(e.resolve_path(a.word(1)));
  } catch (EngineError& err) {
    if (!err.caret()) err.with_caret(err.code() == codes::unsupported ? a.token(0).span() : a.token(1).span());
    throw;
  }
}

CommandTable make_builtin_commands() {
  CommandTable t;
  auto add = [&t](std::string name, std::size_t lo, std::size_t hi, std::string usage, auto fn) {
    std::string unit = "cmd/" + name;
    t.add({std::move(name), lo, hi, std::move(usage), std::move(unit), fn});
  };
  constexpr std::size_t many = 1000;
  add("units", 1, 1, "units lj", cmd_units);
  add("boundary", 3, 3, "boundary p|f p|f p|f", cmd_boundary);
  add("region", 8, 8, "region <id> block <xlo> <xhi> <ylo> <yhi> <zlo> <zhi>", cmd_region);
  add("create_box", 2, 2, "create_box <ntypes> <region-id>", cmd_create_box);
  add("create_atoms", 3, 6, "create_atoms <type> sc <spacing> [jitter <amplitude> <seed>]", cmd_create_atoms);
  add("read_data", 1, 1, "read_data <file>", cmd_read_data);
  add("write_data", 1, 1, "write_data <file>", cmd_write_data);
  add("read_restart", 1, 1, "read_restart <file>", cmd_read_restart);
  add("write_restart", 1, 1, "write_restart <file>", cmd_write_restart);
  add("mass", 2, 2, "mass <type> <value>", cmd_mass);
  add("pair_style", 1, many, "pair_style <style> <args...>", cmd_pair_style);
  add("pair_coeff", 2, many, "pair_coeff <i> <j> <args...>", cmd_pair_coeff);
  add("pair_modify", 2, 2, "pair_modify shift yes|no", cmd_pair_modify);
  add("neighbor", 1, 2, "neighbor <skin> [half|full]", cmd_neighbor);
  add("velocity", 4, 5, "velocity all create <temperature> <seed> | velocity all set <vx> <vy> <vz>", cmd_velocity);
  add("fix", 3, 3, "fix <id> all nve", cmd_fix);
  add("unfix", 1, 1, "unfix <id>", cmd_unfix);
  add("timestep", 1, 1, "timestep <dt>", cmd_timestep);
  add("thermo", 1, 1, "thermo <interval>", cmd_thermo);
  add("run", 1, 1, "run <steps>", cmd_run);
  add("print", 0, many, "print <text...>", cmd_print);
  add("variable", 3, 3, "variable <name> string <value>", cmd_variable);
  add("plugin", 2, 2, "plugin load <path>", cmd_plugin);
  return t;
}

}  // namespace

const CommandTable& builtin_commands() {
  static const CommandTable table = make_builtin_commands();
  return table;
}

}  // namespace mdlite

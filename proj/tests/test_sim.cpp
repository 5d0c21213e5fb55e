#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "mdlite/persist.h"
#include "support.h"

using namespace mdlite;
using namespace mdlite::testing;

namespace {

std::set<std::pair<std::size_t, std::size_t>> list_pairs(const NeighborList& l) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < l.neighbors.size(); ++i)
    for (const auto& nb : l.neighbors[i]) out.insert({std::min<std::size_t>(i, nb.j), std::max<std::size_t>(i, nb.j)});
  return out;
}

std::set<std::pair<std::size_t, std::size_t>> brute_pairs(const SystemState& s, double range) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < s.natoms(); ++i) {
    for (std::size_t j = i + 1; j < s.natoms(); ++j) {
      Vec3 d{s.x[i][0] - s.x[j][0], s.x[i][1] - s.x[j][1], s.x[i][2] - s.x[j][2]};
      for (int k = 0; k < 3; ++k) {
        if (!s.box->periodic[k]) continue;
        const double L = s.box->length(k);
        while (d[k] > 0.5 * L) d[k] -= L;
        while (d[k] < -0.5 * L) d[k] += L;
      }
      if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < range * range) out.insert({i, j});
    }
  }
  return out;
}

SystemState dimer(double r, double length = 10.0) {
  SystemState s = empty_state(length);
  s.add_atom(1, 1, {4.0, 5.0, 5.0});
  s.add_atom(2, 1, {4.0 + r, 5.0, 5.0});
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
  s.nve_fix = "1";
  return s;
}

void give_velocities(SystemState& s, std::uint64_t seed, double scale) {
  SplitMix64 rng(seed);
  for (auto& v : s.v)
    for (int d = 0; d < 3; ++d) v[d] = scale * (rng.uniform() - 0.5);
}

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

}  // namespace

TEST(Neighbor, SmallExamples) {
  SystemState a = empty_state(10.0);
  a.add_atom(1, 1, {1, 1, 1});
  a.add_atom(2, 1, {2, 1, 1});
  EXPECT_EQ(build_neighbor_list(a, NeighborMode::half, 2.5, 0.3).pair_count(), 1u);
  SystemState b = empty_state(10.0);
  b.add_atom(1, 1, {1, 1, 1});
  b.add_atom(2, 1, {4, 1, 1});
  EXPECT_EQ(build_neighbor_list(b, NeighborMode::half, 2.5, 0.3).pair_count(), 0u);
  SystemState chain = empty_state(4.0);
  for (int i = 0; i < 4; ++i) chain.add_atom(i + 1, 1, {double(i), 0, 0});
  EXPECT_EQ(build_neighbor_list(chain, NeighborMode::half, 1.2, 0.1).pair_count(), 4u);
  EXPECT_EQ(brute_pairs(chain, 1.3).size(), 4u);
  EXPECT_EQ(build_neighbor_list(chain, NeighborMode::full, 1.2, 0.1).pair_count(), 8u);
}

TEST(Neighbor, BoxTooSmall) {
  SystemState s = empty_state(4.0);
  s.add_atom(1, 1, {0, 0, 0});
  try {
    build_neighbor_list(s, NeighborMode::half, 2.5, 0.3);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::box_too_small);
  }
}

TEST(Neighbor, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SystemState s = random_state(seed, 30, 6.0, 0.0);
    NeighborList half = build_neighbor_list(s, NeighborMode::half, 2.5, 0.3);
    EXPECT_EQ(list_pairs(half), brute_pairs(s, 2.8)) << seed;
    EXPECT_EQ(half.pair_count(), brute_pairs(s, 2.8).size());
    NeighborList full = build_neighbor_list(s, NeighborMode::full, 2.5, 0.3);
    EXPECT_EQ(full.pair_count(), 2 * half.pair_count());
    EXPECT_EQ(list_pairs(full), list_pairs(half));
  }
}

TEST(Neighbor, NonPeriodicDimensions) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    SystemState s = random_state(seed, 40, 6.0, 0.0);
    s.box->periodic = {true, false, false};
    EXPECT_EQ(list_pairs(build_neighbor_list(s, NeighborMode::half, 2.0, 0.2)), brute_pairs(s, 2.2)) << seed;
  }
}

TEST(Forces, DimerValues) {
  SystemState m = dimer(std::pow(2.0, 1.0 / 6.0));
  ForceResult r = compute_forces(m);
  EXPECT_NEAR(r.energy, -1.0, 1e-14);
  EXPECT_NEAR(m.f[0][0], 0.0, 1e-12);
  EXPECT_NEAR(m.f[1][0], 0.0, 1e-12);
  SystemState one = dimer(1.0);
  ForceResult q = compute_forces(one);
  EXPECT_NEAR(q.energy, 0.0, 1e-14);
  EXPECT_NEAR(one.f[0][0], -24.0, 1e-12);
  EXPECT_NEAR(one.f[1][0], 24.0, 1e-12);
  EXPECT_NEAR(q.virial[0], 24.0, 1e-12);
}

TEST(Forces, StyleRequired) {
  SystemState s = empty_state(10.0);
  s.add_atom(1, 1, {0, 0, 0});
  try {
    compute_forces(s);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::no_style);
  }
}

TEST(Forces, HalfAndFullAgree) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SystemState h = random_state(seed, 100, 6.0, 0.9);
    bind_style(h, "lj/cut 2.5", {"1 1 1.0 1.0"});
    SystemState f = h;
    f.neigh_mode = NeighborMode::full;
    ForceResult eh = compute_forces(h);
    ForceResult ef = compute_forces(f);
    EXPECT_LT(rel(eh.energy, ef.energy), 1e-13);
    for (int k = 0; k < 6; ++k) EXPECT_LT(rel(eh.virial[k], ef.virial[k]), 1e-12);
    for (std::size_t i = 0; i < h.natoms(); ++i)
      for (int d = 0; d < 3; ++d) EXPECT_NEAR(h.f[i][d], f.f[i][d], 1e-12 * std::max(1.0, std::abs(h.f[i][d])));
  }
}

TEST(Forces, FiniteDifference) {
  const double h = 1e-6;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SystemState s = random_state(seed, 20, 6.0, 0.9);
    bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
    compute_forces(s);
    const auto f = s.f;
    double worst = 0.0;
    for (std::size_t i = 0; i < s.natoms(); ++i) {
      for (int d = 0; d < 3; ++d) {
        SystemState p = s, m = s;
        p.x[i][d] += h;
        m.x[i][d] -= h;
        const double fd = -(compute_forces(p).energy - compute_forces(m).energy) / (2 * h);
        worst = std::max(worst, std::abs(fd - f[i][d]));
      }
    }
    EXPECT_LT(worst, 1e-6) << seed;
  }
}

TEST(Forces, NewtonThirdLaw) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemState s = random_state(seed, 60, 6.0, 0.85, 2);
    bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0", "2 2 0.6 1.1", "1 2 0.9 1.0 2.2"});
    compute_forces(s);
    Vec3 sum{0, 0, 0};
    for (const auto& fi : s.f)
      for (int d = 0; d < 3; ++d) sum[d] += fi[d];
    for (int d = 0; d < 3; ++d) EXPECT_LT(std::abs(sum[d]), 1e-12) << seed;
  }
}

TEST(Forces, TranslationAndPermutationInvariance) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemState s = random_state(seed, 50, 6.0, 0.9);
    bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
    const double e0 = compute_forces(s).energy;
    SystemState t = s;
    for (auto& x : t.x) {
      x = {x[0] + 1.234, x[1] - 2.5, x[2] + 0.77};
      t.box->wrap(x);
    }
    EXPECT_LT(rel(compute_forces(t).energy, e0), 1e-12);
    SystemState p = s;
    std::vector<std::size_t> perm(s.natoms());
    std::iota(perm.begin(), perm.end(), 0);
    SplitMix64 rng(seed);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (std::size_t k = 0; k < perm.size(); ++k) {
      p.id[k] = s.id[perm[k]];
      p.x[k] = s.x[perm[k]];
      p.type[k] = s.type[perm[k]];
    }
    EXPECT_LT(rel(compute_forces(p).energy, e0), 1e-12);
  }
}

// Configurational pressure trace(W)/3V against -dE/dV from uniform scaling.
TEST(Forces, VirialMatchesVolumeDerivative) {
  SystemState s = fcc_state(4, 1.6);
  bind_style(s, "lj/cut 2.4", {"1 1 1.0 1.0"});
  ForceResult r = compute_forces(s);
  const double V = s.box->volume();
  const double p_virial = (r.virial[0] + r.virial[1] + r.virial[2]) / (3 * V);
  auto energy_at = [&](double vol) {
    SystemState c = s;
    const double lam = std::cbrt(vol / V);
    for (int d = 0; d < 3; ++d) c.box->hi[d] = c.box->lo[d] + lam * s.box->length(d);
    for (auto& x : c.x)
      for (int d = 0; d < 3; ++d) x[d] = c.box->lo[d] + lam * (x[d] - s.box->lo[d]);
    return compute_forces(c).energy;
  };
  const double dV = 1e-4 * V;
  const double p_fd = -(energy_at(V + dV) - energy_at(V - dV)) / (2 * dV);
  EXPECT_LT(rel(p_virial, p_fd), 1e-4) << p_virial << " vs " << p_fd;
}

TEST(Run, FreeFlight) {
  SystemState s = empty_state(10.0);
  s.add_atom(1, 1, {1.0, 1.0, 1.0}, {1.0, 0.0, 0.0});
  s.add_atom(2, 1, {6.0, 6.0, 6.0});
  bind_style(s, "lj/cut 1.0", {"1 1 1.0 1.0"});
  s.nve_fix = "1";
  s.dt = 0.001;
  run_steps(s, 10, 0);
  EXPECT_NEAR(s.x[0][0], 1.01, 1e-14);
  EXPECT_EQ(s.x[0][1], 1.0);
  EXPECT_EQ(s.step, 10);
}

TEST(Run, ZeroStepsSingleSample) {
  SystemState s = dimer(1.2);
  auto samples = run_steps(s, 0, 10);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].step, 0);
}

TEST(Run, SampleSchedule) {
  SystemState s = dimer(1.2);
  s.dt = 0.001;
  auto samples = run_steps(s, 10, 4);
  std::vector<std::int64_t> steps;
  for (const auto& t : samples) steps.push_back(t.step);
  EXPECT_EQ(steps, (std::vector<std::int64_t>{0, 4, 8, 10}));
  for (const auto& t : samples) EXPECT_EQ(t.total_energy, t.potential_energy + t.kinetic_energy);
}

TEST(Run, RequiresIntegrator) {
  SystemState s = dimer(1.2);
  s.nve_fix.clear();
  try {
    run_steps(s, 1, 0);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::no_integrator);
  }
}

TEST(Run, DimerEnergyConservation) {
  SystemState oracle = dimer(1.2);
  oracle.dt = 1e-5;
  const double e_oracle = run_steps(oracle, 10000, 0).back().total_energy;
  SystemState s = dimer(1.2);
  s.dt = 0.001;
  auto samples = run_steps(s, 100, 0);
  EXPECT_LT(std::abs(samples.back().total_energy - e_oracle), 1e-6);
  EXPECT_LT(std::abs(samples.back().total_energy - samples.front().total_energy), 1e-6);
}

TEST(Run, PositionsStayWrapped) {
  SystemState s = random_state(9, 40, 6.0, 0.9);
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
  give_velocities(s, 3, 4.0);
  s.nve_fix = "1";
  s.dt = 0.002;
  run_steps(s, 50, 0);
  for (const auto& x : s.x)
    for (int d = 0; d < 3; ++d) {
      EXPECT_GE(x[d], 0.0);
      EXPECT_LT(x[d], 6.0);
    }
}

TEST(Decomposed, UnitGridIsBitIdentical) {
  SystemState a = random_state(4, 40, 6.0, 0.9);
  bind_style(a, "lj/cut 2.5", {"1 1 1.0 1.0"});
  give_velocities(a, 8, 1.0);
  a.nve_fix = "1";
  a.dt = 0.002;
  SystemState b = a;
  auto sa = run_steps(a, 6, 2);
  auto sb = decomposed_run(b, 6, {1, 1, 1}, 2);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    EXPECT_EQ(bits(sa[k].total_energy), bits(sb[k].total_energy));
    EXPECT_EQ(bits(sa[k].pressure), bits(sb[k].pressure));
  }
  for (std::size_t i = 0; i < a.natoms(); ++i)
    for (int d = 0; d < 3; ++d) EXPECT_EQ(bits(a.x[i][d]), bits(b.x[i][d]));
}

TEST(Decomposed, TwoDomainsMatchSerial) {
  SystemState a = fcc_state(2, 1.7);
  ASSERT_EQ(a.natoms(), 32u);
  bind_style(a, "lj/cut 1.3", {"1 1 1.0 1.0"});
  a.skin = 0.2;
  give_velocities(a, 21, 2.0);
  a.nve_fix = "1";
  SystemState b = a;
  auto sa = run_steps(a, 4, 1);
  auto sb = decomposed_run(b, 4, {2, 1, 1}, 1);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    EXPECT_LT(rel(sa[k].potential_energy, sb[k].potential_energy), 1e-11);
    EXPECT_LT(rel(sa[k].total_energy, sb[k].total_energy), 1e-11);
    EXPECT_LT(rel(sa[k].pressure, sb[k].pressure), 1e-11);
  }
}

TEST(Decomposed, ForcesMatchOnRandomConfigs) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SystemState a = random_state(seed, 120, 12.0, 0.9);
    bind_style(a, "lj/cut 2.5", {"1 1 1.0 1.0"});
    SystemState b = a;
    ForceResult ra = compute_forces(a);
    ForceResult rb = compute_forces_decomposed(b, {2, 2, 1});
    EXPECT_LT(rel(ra.energy, rb.energy), 1e-12);
    for (int k = 0; k < 6; ++k) EXPECT_LT(rel(ra.virial[k], rb.virial[k]), 1e-11);
    for (std::size_t i = 0; i < a.natoms(); ++i)
      for (int d = 0; d < 3; ++d) EXPECT_NEAR(a.f[i][d], b.f[i][d], 1e-11 * std::max(1.0, std::abs(a.f[i][d])));
  }
}

TEST(Decomposed, BoxTooSmall) {
  SystemState s = empty_state(4.0);
  s.add_atom(1, 1, {1, 1, 1});
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
  s.nve_fix = "1";
  try {
    decomposed_run(s, 1, {8, 8, 8}, 0);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::box_too_small);
  }
}

TEST(Restart, RoundTripIsBitExact) {
  SystemState s = random_state(5, 30, 6.0, 0.9, 2);
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0", "2 2 0.5 1.2", "1 2 0.7 1.1 2.1"});
  s.pair->set_shift(true);
  give_velocities(s, 2, 1.0);
  s.step = 17;
  s.dt = 0.0031;
  s.mass[2] = 2.5;
  const double e0 = compute_forces(s).energy;
  SystemState r = read_restart(write_restart(s), builtin_styles());
  ASSERT_EQ(r.natoms(), s.natoms());
  EXPECT_EQ(r.step, 17);
  EXPECT_EQ(r.dt, 0.0031);
  EXPECT_EQ(r.mass, s.mass);
  EXPECT_EQ(r.id, s.id);
  EXPECT_EQ(r.type, s.type);
  for (std::size_t i = 0; i < s.natoms(); ++i)
    for (int d = 0; d < 3; ++d) {
      EXPECT_EQ(bits(r.x[i][d]), bits(s.x[i][d]));
      EXPECT_EQ(bits(r.v[i][d]), bits(s.v[i][d]));
    }
  EXPECT_TRUE(r.pair->shifted());
  EXPECT_EQ(bits(compute_forces(r).energy), bits(e0));
  EXPECT_EQ(write_restart(r), write_restart(s));
}

TEST(Restart, CorruptionDetected) {
  SystemState s = dimer(1.2);
  const std::string bytes = write_restart(s);
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    EXPECT_THROW(read_restart(bytes.substr(0, n), builtin_styles()), CorruptRestart) << n;
  }
  std::string bad = bytes;
  bad[0] = 'X';
  try {
    read_restart(bad, builtin_styles());
    FAIL();
  } catch (const CorruptRestart& e) {
    EXPECT_EQ(e.code(), codes::corrupt_restart);
    EXPECT_EQ(e.offset(), 0u);
  }
  std::string version = bytes;
  version[4] = 9;
  EXPECT_THROW(read_restart(version, builtin_styles()), CorruptRestart);
  EXPECT_THROW(read_restart(bytes + "x", builtin_styles()), CorruptRestart);
}

TEST(DataFile, RoundTrip) {
  SystemState s = random_state(6, 30, 6.0, 0.9, 2);
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0", "2 2 0.5 1.2"});
  give_velocities(s, 4, 1.0);
  const double e0 = compute_forces(s).energy;
  SystemState r;
  r.pair = s.pair->clone();
  read_data(write_data(s), r);
  EXPECT_EQ(compute_forces(r).energy - e0, 0.0);
  for (std::size_t i = 0; i < s.natoms(); ++i) EXPECT_EQ(r.v[i], s.v[i]);
}

TEST(DataFile, HandWritten) {
  SystemState s;
  read_data(R"(two atoms

2 atoms
1 atom types

0 5 xlo xhi
0 5 ylo yhi
0 5 zlo zhi

Masses

1 1.0

Atoms

1 1 1.0 1.0 1.0
2 1 2.5 1.0 1.0
)", s);
  EXPECT_EQ(s.natoms(), 2u);
  EXPECT_EQ(s.x[1], (Vec3{2.5, 1.0, 1.0}));
  EXPECT_EQ(s.v[1], (Vec3{0, 0, 0}));
}

TEST(DataFile, MissingAtoms) {
  SystemState s;
  try {
    read_data("t\n\n2 atoms\n1 atom types\n0 5 xlo xhi\n0 5 ylo yhi\n0 5 zlo zhi\n\nMasses\n\n1 1.0\n", s);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::parse_failure);
  }
  try {
    read_data("t\n\n1 atoms\n1 atom types\n0 5 xlo xhi\n0 5 ylo yhi\n0 5 zlo zhi\n\nAtoms\n\n1 1 abc 1 1\n", s);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.code(), codes::parse_failure);
    EXPECT_EQ(e.line_number(), 11);
    ASSERT_TRUE(e.caret());
    EXPECT_EQ(e.caret()->start, 4u);
  }
}

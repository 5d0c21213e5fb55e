// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <unistd.h>

#include <fmt/format.h>

#include "mdlite/engine.h"
#include "mdlite/error.h"
#include "mdlite/harness.h"
#include "mdlite/library.h"
#include "mdlite/persist.h"
#include "mdlite/regression.h"
#include "support.h"

using namespace mdlite;
using namespace mdlite::testing;
namespace fs = std::filesystem;

namespace {

const std::string fixture_dir = std::string(MDLITE_SOURCE_DIR) + "/tests/fixtures/force-styles";

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// -- independent references -------------------------------------------------

Vec3 min_image(Vec3 d, double L) {
  for (int k = 0; k < 3; ++k) d[k] -= L * std::round(d[k] / L);
  return d;
}

/// Plain LJ 12-6 with a hard cutoff, summed over all minimum-image pairs.
double lj_energy(const std::vector<Vec3>& x, double L, double cut) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const Vec3 d = min_image({x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]}, L);
      const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
      if (r2 >= cut * cut) continue;
      const double s6 = 1.0 / (r2 * r2 * r2);
      e += 4.0 * (s6 * s6 - s6);
    }
  }
  return e;
}

std::set<std::pair<std::size_t, std::size_t>> brute_pairs(const std::vector<Vec3>& x, double L, double range) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const Vec3 d = min_image({x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]}, L);
      if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < range * range) out.insert({i, j});
    }
  }
  return out;
}

double rel_floor(double a, double b) { return harness::rel_err(a, b, 1e-10); }

// -- criteria ---------------------------------------------------------------

Outcome epsilon_policy() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto cases = harness::load_cases(fixture_dir);
  bool tight = false, loose = false;
  for (const auto& c : cases) {
    if (c.epsilon && *c.epsilon == 1e-13) tight = true;
    if (c.epsilon && *c.epsilon == 1e-8) loose = true;
  }
  if (!tight || !loose) o.fail("fixtures at epsilon 1e-13 and 1e-8 are not both shipped");
  const std::vector<harness::Variant> variants(harness::all_variants.begin(), harness::all_variants.end());
  harness::TolerancePolicy policy;
  policy.global_epsilon = 1e-12;
  int passed = 0, skipped = 0;
  for (const auto& r : harness::run_suite(cases, policy, variants, 1)) {
    if (r.overall == harness::Status::fail) o.fail(harness::report_line(r));
    if (r.overall == harness::Status::pass) ++passed;
    if (r.overall == harness::Status::skip) ++skipped;
  }
  // the harness itself must accept the whole stated range
  for (double eps : {1e-13, 1e-12, 1e-10, 1e-8}) {
    try {
      harness::parse_case(fmt::format("schema: 1\ntest_id: \"e\"\nstyle: \"lj/cut\"\nstyle_setup: []\nepsilon: {}\n", eps));
    } catch (const EngineError& e) {
      o.fail(fmt::format("epsilon {} rejected: {}", eps, e.message()));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds >= 30.0) o.fail(fmt::format("suite took {:.1f} s", seconds));
  if (o.ok) o.detail = fmt::format("{} cases, {} pass, {} skip, {:.2f} s", cases.size(), passed, skipped, seconds);
  return o;
}

Outcome force_oracle() {
  Outcome o;
  const double h = 1e-6, L = 6.0, cut = 2.5;
  double worst = 0.0, worst_energy = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SystemState s = random_state(1000 + seed, 20, L, 0.9);
    bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
    const double e = compute_forces(s).energy;
    worst_energy = std::max(worst_energy, rel_floor(e, lj_energy(s.x, L, cut)));
    for (std::size_t i = 0; i < s.natoms(); ++i) {
      for (int d = 0; d < 3; ++d) {
        std::vector<Vec3> p = s.x, m = s.x;
        p[i][d] += h;
        m[i][d] -= h;
        const double fd = -(lj_energy(p, L, cut) - lj_energy(m, L, cut)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - s.f[i][d]));
      }
    }
  }
  if (worst >= 1e-6) o.fail(fmt::format("max |F - F_fd| = {:.3e}", worst));
  if (worst_energy > 1e-12) o.fail(fmt::format("energy differs from the reference sum by {:.3e}", worst_energy));
  if (o.ok) o.detail = fmt::format("20 configs x 20 atoms, max |F - F_fd| = {:.3e}", worst);
  return o;
}

Outcome code_paths() {
  Outcome o;
  double worst_list = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemState half = random_state(2000 + seed, 100, 6.0, 0.9);
    bind_style(half, "lj/cut 2.5", {"1 1 1.0 1.0"});
    SystemState full = half;
    full.neigh_mode = NeighborMode::full;
    const ForceResult a = compute_forces(half);
    const ForceResult b = compute_forces(full);
    worst_list = std::max(worst_list, rel_floor(a.energy, b.energy));
    for (std::size_t i = 0; i < half.natoms(); ++i)
      for (int d = 0; d < 3; ++d) worst_list = std::max(worst_list, rel_floor(half.f[i][d], full.f[i][d]));
  }
  if (worst_list > 1e-13) o.fail(fmt::format("half vs full list: {:.3e}", worst_list));

  SystemState serial = fcc_state(2, 1.7);
  bind_style(serial, "lj/cut 1.3", {"1 1 1.0 1.0"});
  serial.skin = 0.2;
  SplitMix64 rng(77);
  for (auto& v : serial.v)
    for (int d = 0; d < 3; ++d) v[d] = 2.0 * (rng.uniform() - 0.5);
  serial.nve_fix = "1";
  SystemState split = serial;
  const auto sa = run_steps(serial, 4, 1);
  const auto sb = decomposed_run(split, 4, {2, 1, 1}, 1);
  double worst_grid = 0.0;
  if (serial.natoms() != 32 || sa.size() != sb.size()) o.fail("decomposed run shape mismatch");
  for (std::size_t k = 0; k < std::min(sa.size(), sb.size()); ++k) {
    worst_grid = std::max({worst_grid, rel_floor(sa[k].potential_energy, sb[k].potential_energy),
                           rel_floor(sa[k].total_energy, sb[k].total_energy), rel_floor(sa[k].pressure, sb[k].pressure)});
  }
  for (std::size_t i = 0; i < serial.natoms(); ++i)
    for (int d = 0; d < 3; ++d) {
      worst_grid = std::max(worst_grid, rel_floor(serial.x[i][d], split.x[i][d]));
      worst_grid = std::max(worst_grid, rel_floor(serial.f[i][d], split.f[i][d]));
    }
  if (worst_grid > 1e-11) o.fail(fmt::format("(2,1,1) grid vs serial: {:.3e}", worst_grid));
  if (o.ok) o.detail = fmt::format("half/full {:.3e}, grid(2,1,1) 32 atoms 4 steps {:.3e}", worst_list, worst_grid);
  return o;
}

const harness::CheckResult* find_check(const harness::CheckReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

Outcome single_vs_compute() {
  Outcome o;
  int checked = 0, skipped = 0;
  double worst = 0.0;
  for (const auto& c : harness::load_cases(fixture_dir)) {
    const auto r = harness::run_style_test(c, harness::TolerancePolicy{}, harness::Variant::plain);
    if (const auto* single = find_check(r, "single"); single && single->status == harness::Status::skip) {
      ++skipped;
      continue;
    }
    const auto* e = find_check(r, "single_energy");
    if (!e) {
      o.fail(c.test_id + ": no single_energy check");
      continue;
    }
    ++checked;
    worst = std::max(worst, e->worst_error);
    if (e->worst_error > 1e-12) o.fail(fmt::format("{}: {:.3e}", c.test_id, e->worst_error));
  }
  if (checked == 0) o.fail("no fixture exercised single()");
  if (o.ok) o.detail = fmt::format("{} fixtures, worst {:.3e}, {} without single()", checked, worst, skipped);
  return o;
}

Outcome restart_exactness() {
  Outcome o;
  int fixtures = 0;
  for (const auto& c : harness::load_cases(fixture_dir)) {
    const auto r = harness::run_style_test(c, harness::TolerancePolicy{}, harness::Variant::plain);
    const auto* check = find_check(r, "restart");
    if (!check || check->status != harness::Status::pass) {
      o.fail(fmt::format("{}: restart check {}", c.test_id, check ? check->detail : "missing"));
    }
    ++fixtures;
  }
  // corruption: every truncation and a flipped byte in each section
  SystemState s = random_state(31, 30, 6.0, 0.9);
  bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
  const std::string bytes = write_restart(s);
  const double e0 = compute_forces(s).energy;
  SystemState back = read_restart(bytes, builtin_styles());
  if (std::bit_cast<std::uint64_t>(compute_forces(back).energy) != std::bit_cast<std::uint64_t>(e0)) {
    o.fail("direct round trip energy not bitwise equal");
  }
  int rejected = 0;
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    try {
      read_restart(bytes.substr(0, n), builtin_styles());
      o.fail(fmt::format("truncation at {} accepted", n));
    } catch (const CorruptRestart&) {
      ++rejected;
    }
  }
  for (std::size_t at : {std::size_t{0}, std::size_t{4}, bytes.size() / 2, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[at] = static_cast<char>(bad[at] ^ 0x5a);
    try {
      SystemState r = read_restart(bad, builtin_styles());
      // a flipped payload byte may still decode; it must then differ
      if (write_restart(r) == bytes) o.fail(fmt::format("flip at {} unnoticed", at));
    } catch (const CorruptRestart&) {
      ++rejected;
    } catch (const EngineError& e) {
      o.fail(fmt::format("flip at {} raised {} instead of E-CORRUPT-RESTART", at, e.code()));
    }
  }
  // through the library boundary the instance survives
  const fs::path path = fs::temp_directory_path() / fmt::format("mdlite_acc_{}.restart", ::getpid());
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  const char* argv[] = {"-screen", "none"};
  const mdlite_handle h = mdlite_open(2, argv);
  const int status = mdlite_command(h, ("read_restart " + path.string()).c_str());
  mdlite_error err;
  mdlite_get_last_error(h, &err);
  if (status != MDLITE_FAILED || std::string(err.code) != codes::corrupt_restart) {
    o.fail(fmt::format("library read of a truncated restart gave status {} code '{}'", status, err.code));
  }
  if (mdlite_command(h, "units lj") != MDLITE_OK) o.fail("instance unusable after corrupt restart");
  mdlite_close(h);
  fs::remove(path);
  if (o.ok) o.detail = fmt::format("{} fixtures bitwise, {} corrupt streams rejected", fixtures, rejected);
  return o;
}

struct DeathCase {
  std::vector<std::string> setup;
  std::string line;
  std::string_view code;
  std::string token;  // offending token, located in `line`
};

Outcome death_tests() {
  const std::vector<std::string> boxed{"units lj", "region b block 0 6 0 6 0 6", "create_box 1 b"};
  std::vector<std::string> styled = boxed;
  styled.push_back("pair_style lj/cut 2.5");
  const std::vector<DeathCase> cases{
      {{}, "frobnicate 1 2", codes::unknown_command, "frobnicate"},
      {{}, "timestep abc", codes::bad_argument, "abc"},
      {{}, "units lj real", codes::arg_count, "real"},
      {{}, "print \"unterminated", codes::unterminated_quote, "\"unterminated"},
      {{}, "print caf\xc3\xa9", codes::non_ascii, "\xc3"},
      {{}, "print ${nope}", codes::undefined_variable, "${nope}"},
      {{}, "pair_style eam 2.5", codes::unknown_style, "eam"},
      {{}, "create_atoms 1 sc 1.0", codes::no_box, "create_atoms"},
      {boxed, "run 10", codes::no_style, "run"},
      {styled, "pair_coeff 1 3 1.0 1.0", codes::bad_argument, "3"},
      {boxed, "create_box 1 b", codes::box_exists, "create_box"},
      {{}, "read_data missing.data", codes::io_failure, "missing.data"},
      {{}, "neighbor -0.5", codes::bad_argument, "-0.5"},
      {{}, "boundary p x p", codes::bad_argument, "x"},
      {boxed, "region c block 0 6 5 1 0 6", codes::bad_argument, "1"},
  };
  Outcome o;
  int n = 0;
  for (const auto& c : cases) {
    const std::size_t start = c.line.find(c.token);
    {
      Engine e;
      try {
        for (const auto& s : c.setup) e.execute(s);
        e.execute(c.line, static_cast<int>(c.setup.size()) + 1);
        o.fail(fmt::format("'{}' did not fail", c.line));
        continue;
      } catch (const EngineError& err) {
        if (err.code() != c.code) o.fail(fmt::format("'{}': code {} expected {}", c.line, err.code(), c.code));
        if (!err.caret() || err.caret()->start != start || err.caret()->width() != c.token.size()) {
          o.fail(fmt::format("'{}': caret {} expected {}+{}", c.line,
                             err.caret() ? fmt::format("{}+{}", err.caret()->start, err.caret()->width()) : "none", start,
                             c.token.size()));
        }
        const std::string rendered = render_error(err);
        if (rendered.find(fmt::format("[{}]", c.code)) == std::string::npos) o.fail("render lacks code: " + rendered);
      }
    }
    // same thing through the library: a status, never an abort
    const char* argv[] = {"-screen", "none"};
    const mdlite_handle h = mdlite_open(2, argv);
    for (const auto& s : c.setup) mdlite_command(h, s.c_str());
    const int status = mdlite_command(h, c.line.c_str());
    mdlite_error err;
    mdlite_get_last_error(h, &err);
    if (status != MDLITE_FAILED || !err.has_error || std::string(err.code) != c.code) {
      o.fail(fmt::format("library '{}': status {} code '{}'", c.line, status, err.code));
    }
    if (mdlite_command(h, "units lj") != MDLITE_OK) o.fail(fmt::format("instance dead after '{}'", c.line));
    mdlite_close(h);
    ++n;
  }
  if (n < 10) o.fail("fewer than 10 death cases ran");
  if (o.ok) o.detail = fmt::format("{} malformed inputs: codes, carets and library status", n);
  return o;
}

Outcome quick_mode() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / fmt::format("mdlite_acc_corpus_{}", ::getpid());
  fs::remove_all(root);
  std::set<std::string> expected;
  for (int i = 0; i < 20; ++i) {
    const std::string style = i % 4 == 0 ? "lj/cut" : i % 4 == 1 ? "morse" : i % 4 == 2 ? "lj/cut/unrolled" : "table";
    std::string coeff = style == "morse" ? "pair_coeff 1 1 1.0 2.0 1.1"
                        : style == "table" ? "pair_coeff 1 1 build 300 0.5 2.5 morse 1.0 2.0 1.1"
                                           : "pair_coeff 1 1 1.0 1.0";
    const std::string name = fmt::format("case{:02d}", i);
    if (style == "lj/cut") expected.insert(name);
    fs::create_directories(root / name);
    std::ofstream(root / name / "input.in") << fmt::format(
        "units lj\nregion b block 0 6 0 6 0 6\ncreate_box 1 b\ncreate_atoms 1 sc 1.5 jitter 0.05 {0}\n"
        "mass 1 1.0\nvelocity all create 1.0 {0}\npair_style {1}\n{2}\nfix 1 all nve\nthermo 5\nrun 10\n",
        i + 1, style == "table" ? "table" : style + " 2.5", coeff);
    std::ofstream(root / name / "meta.yaml") << "max_steps: 10\n";
  }
  const auto corpus = regression::scan_corpus(root.string());
  regression::RunOptions bless;
  bless.bless = true;
  for (const auto& r : regression::run_regression(corpus, bless))
    if (!r.passed) o.fail("bless " + r.name + ": " + r.message);

  const std::vector<std::string> diff{"src/pair/lj_cut.cpp"};
  const auto all = regression::select_examples(corpus, diff, 100, 42, builtin_styles(), builtin_commands());
  std::set<std::string> matched;
  for (const auto& e : all.matched) matched.insert(e.name);
  if (all.changed_names != std::set<std::string>{"lj/cut"}) o.fail("changed set is not {lj/cut}");
  if (matched != expected) o.fail(fmt::format("matched {} examples, expected {}", matched.size(), expected.size()));

  auto pick = [&] {
    std::vector<std::string> names;
    for (const auto& e : regression::select_examples(corpus, diff, 3, 42, builtin_styles(), builtin_commands()).chosen)
      names.push_back(e.name);
    return names;
  };
  const auto first = pick(), second = pick();
  if (first.size() != 3 || first != second) o.fail("threshold 3 seed 42 subsets differ or have the wrong size");
  for (const auto& n : first)
    if (!expected.count(n)) o.fail(n + " chosen but does not use lj/cut");

  auto report = [&](int workers) {
    regression::RunOptions opt;
    opt.workers = workers;
    std::string text;
    for (const auto& r : regression::run_regression(corpus, opt)) text += regression::report_line(r) + "\n";
    return text;
  };
  const std::string one = report(1), four = report(4);
  if (one != four) o.fail("workers 1 and 4 reports differ");
  if (one.find("FAIL") != std::string::npos) o.fail("corpus does not pass against its own logs");
  fs::remove_all(root);
  if (o.ok) o.detail = fmt::format("{} of 20 matched, subset {}, reports identical ({} bytes)", matched.size(),
                                   utils::join(first, ","), one.size());
  return o;
}

Outcome energy_conservation() {
  Outcome o;
  auto dimer = [](double dt) {
    SystemState s = empty_state(10.0);
    s.add_atom(1, 1, {4.0, 5.0, 5.0});
    s.add_atom(2, 1, {5.2, 5.0, 5.0});
    bind_style(s, "lj/cut 2.5", {"1 1 1.0 1.0"});
    s.nve_fix = "1";
    s.dt = dt;
    return s;
  };
  SystemState fine = dimer(1e-5);
  const double oracle = run_steps(fine, 10000, 0).back().total_energy;
  SystemState coarse = dimer(0.001);
  const auto samples = run_steps(coarse, 100, 0);
  const double drift = std::abs(samples.back().total_energy - oracle);
  // at rest, the exact conserved value is the pair energy at r = 1.2
  const double exact = 4.0 * (std::pow(1.2, -12) - std::pow(1.2, -6));
  if (drift >= 1e-6) o.fail(fmt::format("drift against the dt=1e-5 run {:.3e}", drift));
  if (std::abs(oracle - exact) >= 1e-6) o.fail(fmt::format("fine run off the analytic energy by {:.3e}", oracle - exact));
  if (o.ok) o.detail = fmt::format("|E(100 steps) - E_oracle| = {:.3e}", drift);
  return o;
}

Outcome neighbor_oracle() {
  Outcome o;
  const double cut = 2.5, skin = 0.3, L = 6.0;
  std::size_t pairs = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SystemState s = random_state(3000 + seed, 30, L, 0.0);
    const NeighborList list = build_neighbor_list(s, NeighborMode::half, cut, skin);
    std::set<std::pair<std::size_t, std::size_t>> got;
    std::size_t entries = 0;
    for (std::size_t i = 0; i < list.neighbors.size(); ++i)
      for (const auto& nb : list.neighbors[i]) {
        const std::size_t j = nb.j;
        got.insert({std::min(i, j), std::max(i, j)});
        ++entries;
      }
    const auto want = brute_pairs(s.x, L, cut + skin);
    if (got != want || entries != want.size()) o.fail(fmt::format("config {}: {} listed vs {} brute force", seed, entries, want.size()));
    pairs += want.size();
  }
  if (o.ok) o.detail = fmt::format("50 configs x 30 atoms, {} pairs identical", pairs);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"epsilon-policy", epsilon_policy},
      {"force-oracle", force_oracle},
      {"code-path-equivalence", code_paths},
      {"single-vs-compute", single_vs_compute},
      {"restart-exactness", restart_exactness},
      {"death-tests", death_tests},
      {"quick-mode", quick_mode},
      {"energy-conservation", energy_conservation},
      {"neighbor-oracle", neighbor_oracle},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    std::cout << (r.ok ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
    if (!r.ok) ++failed;
  }
  return failed ? 1 : 0;
}

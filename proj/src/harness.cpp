#include "mdlite/harness.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "mdlite/engine.h"
#include "mdlite/md.h"
#include "mdlite/parallel.h"
#include "mdlite/persist.h"
#include "mdlite/utils.h"

namespace mdlite::harness {

double rel_err(double a, double b, double floor) {
  const double diff = std::abs(a - b);
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale >= floor ? diff / scale : diff;
}

void TolerancePolicy::validate() const {
  if (!(global_epsilon > 0.0) || !(variant_multiplier > 0.0) || !(floor > 0.0)) {
    throw std::invalid_argument("tolerance policy values must be positive");
  }
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::unrolled: return "unrolled";
    case Variant::half_list: return "half_list";
    case Variant::full_list: return "full_list";
  }
  return "plain";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : all_variants) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view status_name(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::skip: return "SKIP";
  }
  return "FAIL";
}

std::string StyleTestCase::base_dir() const {
  if (origin.empty()) return {};
  return std::filesystem::path(origin).parent_path().string();
}

void CheckReport::finalize() {
  worst_error = 0.0;
  bool any_fail = false;
  bool any_pass = false;
  for (const CheckResult& c : checks) {
    if (c.status == Status::fail) any_fail = true;
    if (c.status == Status::pass) any_pass = true;
    if (c.status != Status::skip) worst_error = std::max(worst_error, c.worst_error);
  }
  if (any_fail) {
    overall = Status::fail;
  } else if (any_pass) {
    overall = Status::pass;
  } else {
    overall = Status::skip;
  }
}

// ---------------------------------------------------------------- fixture I/O

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const YAML::Node& node, const std::string& what) {
  EngineError e(codes::parse_failure, fmt::format("{}: {}", origin, what));
  const YAML::Mark m = node.Mark();
  if (m.line >= 0) e.with_line_number(m.line + 1);
  throw e;
}

double as_real(const std::string& origin, const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) parse_fail(origin, n, fmt::format("'{}' must be a number", key));
  try {
    return utils::parse_real(n.Scalar()).value;
  } catch (const utils::NotANumber&) {
    parse_fail(origin, n, fmt::format("'{}' must be a number, found '{}'", key, n.Scalar()));
  }
}

std::int64_t as_int(const std::string& origin, const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) parse_fail(origin, n, fmt::format("'{}' must be an integer", key));
  try {
    return utils::parse_int(n.Scalar());
  } catch (const utils::NotANumber&) {
    parse_fail(origin, n, fmt::format("'{}' must be an integer, found '{}'", key, n.Scalar()));
  }
}

std::string as_string(const std::string& origin, const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) parse_fail(origin, n, fmt::format("'{}' must be a string", key));
  return n.Scalar();
}

std::vector<std::string> as_strings(const std::string& origin, const YAML::Node& n, const std::string& key) {
  if (n.IsNull()) return {};
  if (!n.IsSequence()) parse_fail(origin, n, fmt::format("'{}' must be a list of strings", key));
  std::vector<std::string> out;
  for (const auto& item : n) out.push_back(as_string(origin, item, key));
  return out;
}

std::array<double, 6> as_virial(const std::string& origin, const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 6) parse_fail(origin, n, fmt::format("'{}' must be a list of 6 numbers", key));
  std::array<double, 6> out{};
  for (std::size_t k = 0; k < 6; ++k) out[k] = as_real(origin, n[k], key);
  return out;
}

std::vector<Vec3> as_forces(const std::string& origin, const YAML::Node& n, const std::string& key,
                            std::size_t n_atoms) {
  if (!n.IsSequence() || n.size() != n_atoms) {
    parse_fail(origin, n, fmt::format("'{}' must have one entry per atom ({})", key, n_atoms));
  }
  std::vector<Vec3> out;
  for (const auto& row : n) {
    if (!row.IsSequence() || row.size() != 3) parse_fail(origin, row, fmt::format("'{}' rows must have 3 numbers", key));
    out.push_back({as_real(origin, row[0], key), as_real(origin, row[1], key), as_real(origin, row[2], key)});
  }
  return out;
}

void reject_unknown_keys(const std::string& origin, const YAML::Node& map, const std::set<std::string>& allowed) {
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) parse_fail(origin, kv.first, fmt::format("unknown key '{}'", key));
  }
}

const std::set<std::string> case_keys{"schema",     "test_id",      "style",       "engine_version",
                                      "tags",       "epsilon",      "run_steps",   "pre_commands",
                                      "data_source", "style_setup", "post_commands", "reference"};
const std::set<std::string> reference_keys{"n_atoms",    "init_energy", "init_virial", "init_forces",
                                           "run_energy", "run_virial",  "run_forces"};

}  // namespace

StyleTestCase parse_case(std::string_view yaml, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& ex) {
    EngineError e(codes::parse_failure, fmt::format("{}: {}", origin, ex.msg));
    if (ex.mark.line >= 0) e.with_line_number(ex.mark.line + 1);
    throw e;
  }
  if (!root.IsMap()) parse_fail(origin, root, "a fixture must be a mapping");
  reject_unknown_keys(origin, root, case_keys);
  for (const char* key : {"schema", "test_id", "style", "style_setup"}) {
    if (!root[key]) parse_fail(origin, root, fmt::format("missing required key '{}'", key));
  }
  if (as_int(origin, root["schema"], "schema") != fixture_schema) {
    parse_fail(origin, root["schema"], fmt::format("unsupported schema version (expected {})", fixture_schema));
  }

  StyleTestCase c;
  c.origin = origin;
  c.test_id = as_string(origin, root["test_id"], "test_id");
  if (c.test_id.empty() || c.test_id.find_first_of(" \t") != std::string::npos) {
    parse_fail(origin, root["test_id"], "test_id must be a non-empty word");
  }
  c.style = as_string(origin, root["style"], "style");
  if (root["engine_version"]) c.engine_version = as_string(origin, root["engine_version"], "engine_version");
  if (root["tags"]) {
    for (const std::string& t : as_strings(origin, root["tags"], "tags")) c.tags.insert(t);
  }
  if (root["epsilon"] && !root["epsilon"].IsNull()) {
    const double eps = as_real(origin, root["epsilon"], "epsilon");
    if (!(eps >= min_case_epsilon && eps <= max_case_epsilon)) {
      parse_fail(origin, root["epsilon"], fmt::format("epsilon {} is outside [{}, {}]", utils::format_exact(eps),
                                                      min_case_epsilon, max_case_epsilon));
    }
    c.epsilon = eps;
  }
  if (root["run_steps"]) {
    const std::int64_t n = as_int(origin, root["run_steps"], "run_steps");
    if (n < 0 || n > 100000) parse_fail(origin, root["run_steps"], "run_steps must be in 0..100000");
    c.run_steps = static_cast<int>(n);
  }
  if (root["pre_commands"]) c.pre_commands = as_strings(origin, root["pre_commands"], "pre_commands");
  if (root["data_source"] && !root["data_source"].IsNull()) {
    c.data_source = as_string(origin, root["data_source"], "data_source");
  }
  c.style_setup = as_strings(origin, root["style_setup"], "style_setup");
  if (root["post_commands"]) c.post_commands = as_strings(origin, root["post_commands"], "post_commands");

  if (const YAML::Node ref = root["reference"]; ref && !ref.IsNull()) {
    if (!ref.IsMap()) parse_fail(origin, ref, "'reference' must be a mapping");
    reject_unknown_keys(origin, ref, reference_keys);
    for (const std::string& key : reference_keys) {
      if (!ref[key]) parse_fail(origin, ref, fmt::format("reference is missing '{}'", key));
    }
    ReferenceBlock r;
    const std::int64_t n = as_int(origin, ref["n_atoms"], "n_atoms");
    if (n < 0) parse_fail(origin, ref["n_atoms"], "n_atoms must not be negative");
    r.n_atoms = static_cast<std::size_t>(n);
    r.init_energy = as_real(origin, ref["init_energy"], "init_energy");
    r.init_virial = as_virial(origin, ref["init_virial"], "init_virial");
    r.init_forces = as_forces(origin, ref["init_forces"], "init_forces", r.n_atoms);
    r.run_energy = as_real(origin, ref["run_energy"], "run_energy");
    r.run_virial = as_virial(origin, ref["run_virial"], "run_virial");
    r.run_forces = as_forces(origin, ref["run_forces"], "run_forces", r.n_atoms);
    c.reference = std::move(r);
  }
  return c;
}

StyleTestCase load_case(const std::string& path) {
  std::string text;
  try {
    text = utils::read_file(path);
  } catch (const std::exception& ex) {
    throw EngineError(codes::io_failure, ex.what());
  }
  return parse_case(text, path);
}

std::vector<StyleTestCase> load_cases(const std::string& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw EngineError(codes::io_failure, fmt::format("fixture directory '{}' does not exist", dir));
  }
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".yaml") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<StyleTestCase> out;
  for (const auto& p : paths) out.push_back(load_case(p));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.test_id < b.test_id; });
  return out;
}

namespace {

std::string yaml_quoted(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void emit_list(std::string& out, std::string_view key, const std::vector<std::string>& items) {
  if (items.empty()) {
    out += fmt::format("{}: []\n", key);
    return;
  }
  out += fmt::format("{}:\n", key);
  for (const auto& s : items) out += fmt::format("  - {}\n", yaml_quoted(s));
}

std::string real_list(const double* v, std::size_t n) {
  std::string out = "[";
  for (std::size_t k = 0; k < n; ++k) {
    if (k) out += ", ";
    out += utils::format_exact(v[k]);
  }
  return out + "]";
}

void emit_forces(std::string& out, std::string_view key, const std::vector<Vec3>& f) {
  if (f.empty()) {
    out += fmt::format("  {}: []\n", key);
    return;
  }
  out += fmt::format("  {}:\n", key);
  for (const Vec3& v : f) out += fmt::format("    - {}\n", real_list(v.data(), 3));
}

}  // namespace

std::string emit_case(const StyleTestCase& c) {
  std::string out;
  out += fmt::format("schema: {}\n", fixture_schema);
  out += fmt::format("test_id: {}\n", yaml_quoted(c.test_id));
  out += fmt::format("style: {}\n", yaml_quoted(c.style));
  out += fmt::format("engine_version: {}\n", yaml_quoted(c.engine_version));
  emit_list(out, "tags", std::vector<std::string>(c.tags.begin(), c.tags.end()));
  if (c.epsilon) out += fmt::format("epsilon: {}\n", utils::format_exact(*c.epsilon));
  out += fmt::format("run_steps: {}\n", c.run_steps);
  emit_list(out, "pre_commands", c.pre_commands);
  out += fmt::format("data_source: {}\n", yaml_quoted(c.data_source));
  emit_list(out, "style_setup", c.style_setup);
  emit_list(out, "post_commands", c.post_commands);
  if (c.reference) {
    const ReferenceBlock& r = *c.reference;
    out += "reference:\n";
    out += fmt::format("  n_atoms: {}\n", r.n_atoms);
    out += fmt::format("  init_energy: {}\n", utils::format_exact(r.init_energy));
    out += fmt::format("  init_virial: {}\n", real_list(r.init_virial.data(), 6));
    emit_forces(out, "init_forces", r.init_forces);
    out += fmt::format("  run_energy: {}\n", utils::format_exact(r.run_energy));
    out += fmt::format("  run_virial: {}\n", real_list(r.run_virial.data(), 6));
    emit_forces(out, "run_forces", r.run_forces);
  }
  return out;
}

// ---------------------------------------------------------------- running

namespace {

/// Thrown when the case cannot run in this build; the report becomes a skip.
struct SkipCase {
  std::string reason;
};

std::string unrolled_name(const std::string& style) { return style + "/unrolled"; }

std::vector<std::string> style_lines_for(const StyleTestCase& c, Variant v, const StyleRegistry& styles) {
  if (v != Variant::unrolled) return c.style_setup;
  const std::string target = unrolled_name(c.style);
  if (!styles.contains(target)) throw SkipCase{fmt::format("style {} has no unrolled variant", c.style)};
  std::vector<std::string> out;
  for (const std::string& line : c.style_setup) {
    TokenStream ts = tokenize(line);
    if (ts.size() >= 2 && ts[0].text == "pair_style" && ts[1].text == c.style && !ts[1].quoted) {
      std::string rewritten = line;
      rewritten.replace(ts[1].column, ts[1].text.size(), target);
      out.push_back(std::move(rewritten));
    } else {
      out.push_back(line);
    }
  }
  return out;
}

std::unique_ptr<Engine> build_engine(const StyleTestCase& c, Variant v) {
  EngineOptions o;
  o.base_dir = c.base_dir();
  auto e = std::make_unique<Engine>(o);
  int line = 0;
  for (const auto& cmd : c.pre_commands) e->execute(cmd, ++line);
  if (!e->styles().contains(c.style)) throw SkipCase{fmt::format("pair style {} is not available", c.style)};
  const std::vector<std::string> style_lines = style_lines_for(c, v, e->styles());
  if (!c.data_source.empty()) e->execute("read_data \"" + c.data_source + "\"", ++line);
  for (const auto& cmd : style_lines) e->execute(cmd, ++line);
  for (const auto& cmd : c.post_commands) e->execute(cmd, ++line);
  SystemState& s = e->state();
  s.require_box();
  s.require_pair();
  if (v == Variant::half_list) s.neigh_mode = NeighborMode::half;
  if (v == Variant::full_list) s.neigh_mode = NeighborMode::full;
  if (s.nve_fix.empty()) s.nve_fix = "harness";
  return e;
}

std::vector<Vec3> forces_by_id(const SystemState& s) {
  std::vector<Vec3> out;
  out.reserve(s.natoms());
  for (std::size_t i : s.id_order()) out.push_back(s.f[i]);
  return out;
}

struct Snapshot {
  double energy = 0.0;
  std::array<double, 6> virial{};
  std::vector<Vec3> forces;
};

Snapshot snapshot_init(SystemState s) {
  const ForceResult r = compute_forces(s);
  return {r.energy, r.virial, forces_by_id(s)};
}

Snapshot snapshot_run(SystemState s, int steps) {
  const auto samples = run_steps(s, steps, 0);
  return {samples.back().potential_energy, samples.back().virial, forces_by_id(s)};
}

class Comparer {
 public:
  Comparer(std::string name, double eps, double floor) : eps_(eps), floor_(floor) { result_.name = std::move(name); }

  void scalar(double got, double want, std::size_t index = 0) {
    double e = rel_err(got, want, floor_);
    if (std::isnan(e)) e = INFINITY;
    if (e > result_.worst_error) {
      result_.worst_error = e;
      result_.index = index;
      result_.detail = fmt::format("got {} expected {}", utils::format_exact(got), utils::format_exact(want));
    }
  }
  void forces(const std::vector<Vec3>& got, const std::vector<Vec3>& want) {
    if (got.size() != want.size()) {
      shape_error_ = fmt::format("{} atoms but reference has {}", got.size(), want.size());
      return;
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      for (int d = 0; d < 3; ++d) scalar(got[i][d], want[i][d], i);
  }
  template <std::size_t N>
  void array(const std::array<double, N>& got, const std::array<double, N>& want) {
    for (std::size_t k = 0; k < N; ++k) scalar(got[k], want[k], k);
  }

  CheckResult finish() {
    if (!shape_error_.empty()) {
      result_.status = Status::fail;
      result_.worst_error = INFINITY;
      result_.detail = shape_error_;
    } else {
      result_.status = result_.worst_error <= eps_ ? Status::pass : Status::fail;
    }
    return result_;
  }

 private:
  double eps_;
  double floor_;
  CheckResult result_;
  std::string shape_error_;
};

/// Tolerance-free: any difference in bits fails.
class ExactComparer {
 public:
  explicit ExactComparer(std::string name) { result_.name = std::move(name); }
  void scalar(double got, double want, std::size_t index = 0) {
    if (std::bit_cast<std::uint64_t>(got) == std::bit_cast<std::uint64_t>(want)) return;
    const double e = std::max(rel_err(got, want, 1e-300), std::numeric_limits<double>::min());
    if (e > result_.worst_error || result_.status == Status::pass) {
      result_.worst_error = std::max(result_.worst_error, e);
      result_.index = index;
      result_.detail = fmt::format("got {} expected {}", utils::format_exact(got), utils::format_exact(want));
    }
    result_.status = Status::fail;
  }
  CheckResult finish() { return result_; }

 private:
  CheckResult result_;
};

CheckResult failed_check(std::string name, const std::exception& ex) {
  CheckResult r;
  r.name = std::move(name);
  r.status = Status::fail;
  r.worst_error = INFINITY;
  const auto* ee = dynamic_cast<const EngineError*>(&ex);
  r.detail = ee ? fmt::format("{} [{}]", ee->message(), ee->code()) : ex.what();
  return r;
}

CheckResult skipped_check(std::string name, std::string why) {
  CheckResult r;
  r.name = std::move(name);
  r.status = Status::skip;
  r.detail = std::move(why);
  return r;
}

/// Sum of single() over the half list against compute().
void single_check(const SystemState& base, const Snapshot& init, double eps, double floor, CheckReport& report) {
  SystemState s = base;
  PairStyle& pair = s.require_pair();
  if (!pair.has_single()) {
    report.checks.push_back(skipped_check("single", fmt::format("{} has no single()", pair.name())));
    return;
  }
  pair.init(s.ntypes);
  const SimBox& box = s.require_box();
  const NeighborList list = build_neighbor_list(s, NeighborMode::half, pair.cutoff(), s.skin);
  double energy = 0.0;
  std::vector<Vec3> f(s.natoms(), Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < s.natoms(); ++i) {
    for (const Neighbor& nb : list.neighbors[i]) {
      Vec3 del{s.x[i][0] - s.x[nb.j][0], s.x[i][1] - s.x[nb.j][1], s.x[i][2] - s.x[nb.j][2]};
      box.minimum_image(del);
      const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
      if (rsq >= pair.cutsq(s.type[i], s.type[nb.j])) continue;
      const PairTerm t = pair.single(s.type[i], s.type[nb.j], rsq);
      energy += t.energy;
      for (int d = 0; d < 3; ++d) {
        f[i][d] += del[d] * t.fpair;
        f[nb.j][d] -= del[d] * t.fpair;
      }
    }
  }
  std::vector<Vec3> by_id;
  for (std::size_t i : s.id_order()) by_id.push_back(f[i]);

  Comparer energy_cmp("single_energy", eps, floor);
  energy_cmp.scalar(energy, init.energy);
  report.checks.push_back(energy_cmp.finish());
  // summation order differs from compute(), so components that nearly cancel
  // are judged against the rms force instead of their own size
  double sq = 0.0;
  for (const Vec3& v : init.forces) sq += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double rms = init.forces.empty() ? 0.0 : std::sqrt(sq / (3.0 * init.forces.size()));
  Comparer force_cmp("single_forces", eps, std::max(floor, rms));
  force_cmp.forces(by_id, init.forces);
  report.checks.push_back(force_cmp.finish());
}

void restart_check(const SystemState& base, const Snapshot& init, const StyleRegistry& styles, CheckReport& report) {
  SystemState restored = read_restart(write_restart(base), styles);
  restored.neigh_mode = base.neigh_mode;
  restored.skin = base.skin;
  const Snapshot again = snapshot_init(std::move(restored));
  ExactComparer cmp("restart");
  cmp.scalar(again.energy, init.energy);
  for (std::size_t k = 0; k < 6; ++k) cmp.scalar(again.virial[k], init.virial[k], k);
  if (again.forces.size() != init.forces.size()) {
    cmp.scalar(static_cast<double>(again.forces.size()), static_cast<double>(init.forces.size()));
  } else {
    for (std::size_t i = 0; i < init.forces.size(); ++i)
      for (int d = 0; d < 3; ++d) cmp.scalar(again.forces[i][d], init.forces[i][d], i);
  }
  report.checks.push_back(cmp.finish());
}

void data_check(const SystemState& base, const Snapshot& init, double eps, double floor, CheckReport& report) {
  SystemState copy = base;
  read_data(write_data(base), copy, "data round trip");
  const Snapshot again = snapshot_init(std::move(copy));
  Comparer cmp("data", eps, floor);
  cmp.scalar(again.energy, init.energy);
  cmp.array(again.virial, init.virial);
  cmp.forces(again.forces, init.forces);
  report.checks.push_back(cmp.finish());
}

template <class Fn>
void guarded(CheckReport& report, const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    report.checks.push_back(failed_check(name, ex));
  }
}

}  // namespace

CheckReport run_style_test(const StyleTestCase& c, const TolerancePolicy& policy, Variant variant) {
  CheckReport report;
  report.test_id = c.test_id;
  report.variant = variant;

  std::unique_ptr<Engine> engine;
  try {
    engine = build_engine(c, variant);
  } catch (const SkipCase& skip) {
    report.message = skip.reason;
    report.finalize();
    return report;
  } catch (const EngineError& e) {
    report.message = render_error(e);
    report.checks.push_back(failed_check("setup", e));
    report.finalize();
    return report;
  }
  if (!c.reference) {
    report.message = "no reference block; run gen-ref first";
    CheckResult missing;
    missing.name = "reference";
    missing.status = Status::fail;
    missing.worst_error = INFINITY;
    missing.detail = report.message;
    report.checks.push_back(missing);
    report.finalize();
    return report;
  }

  double eps = c.epsilon.value_or(policy.global_epsilon);
  if (variant != Variant::plain) eps *= policy.variant_multiplier;
  const ReferenceBlock& ref = *c.reference;
  const SystemState& base = engine->state();

  Snapshot init;
  bool have_init = false;
  guarded(report, "init", [&] {
    init = snapshot_init(base);
    have_init = true;
    Comparer energy("init_energy", eps, policy.floor);
    energy.scalar(init.energy, ref.init_energy);
    report.checks.push_back(energy.finish());
    Comparer virial("init_virial", eps, policy.floor);
    virial.array(init.virial, ref.init_virial);
    report.checks.push_back(virial.finish());
    Comparer forces("init_forces", eps, policy.floor);
    forces.forces(init.forces, ref.init_forces);
    report.checks.push_back(forces.finish());
  });
  guarded(report, "run", [&] {
    const Snapshot run = snapshot_run(base, c.run_steps);
    Comparer energy("run_energy", eps, policy.floor);
    energy.scalar(run.energy, ref.run_energy);
    report.checks.push_back(energy.finish());
    Comparer virial("run_virial", eps, policy.floor);
    virial.array(run.virial, ref.run_virial);
    report.checks.push_back(virial.finish());
    Comparer forces("run_forces", eps, policy.floor);
    forces.forces(run.forces, ref.run_forces);
    report.checks.push_back(forces.finish());
  });
  if (have_init) {
    guarded(report, "single", [&] { single_check(base, init, eps, policy.floor, report); });
    guarded(report, "restart", [&] { restart_check(base, init, engine->styles(), report); });
    guarded(report, "data", [&] { data_check(base, init, eps, policy.floor, report); });
  }
  report.finalize();
  return report;
}

StyleTestCase generate_reference(StyleTestCase c) {
  std::unique_ptr<Engine> engine;
  try {
    engine = build_engine(c, Variant::plain);
  } catch (const SkipCase& skip) {
    throw EngineError(codes::unknown_style, skip.reason);
  }
  const SystemState& base = engine->state();
  ReferenceBlock ref;
  ref.n_atoms = base.natoms();
  const Snapshot init = snapshot_init(base);
  ref.init_energy = init.energy;
  ref.init_virial = init.virial;
  ref.init_forces = init.forces;
  const Snapshot run = snapshot_run(base, c.run_steps);
  ref.run_energy = run.energy;
  ref.run_virial = run.virial;
  ref.run_forces = run.forces;
  c.reference = std::move(ref);
  c.engine_version = std::string(engine_version());
  return c;
}

CheckReport run_death_test(const std::optional<std::string>& expected_code, const std::vector<std::string>& lines) {
  CheckReport report;
  report.test_id = "death";
  CheckResult check;
  check.name = "death";
  try {
    Engine e;
    int lineno = 0;
    for (const auto& l : lines) e.execute(l, ++lineno);
    check.status = Status::fail;
    check.detail = "input ran without error";
  } catch (const EngineError& err) {
    report.message = render_error(err);
    if (expected_code && err.code() != *expected_code) {
      check.status = Status::fail;
      check.detail = fmt::format("expected {} but got {}", *expected_code, err.code());
    } else if (!err.line_number() || !err.source_line()) {
      check.status = Status::fail;
      check.detail = "error carries no line context";
    } else {
      check.status = Status::pass;
      check.detail = err.code();
    }
  } catch (const std::exception& ex) {
    check.status = Status::fail;
    check.detail = fmt::format("non-engine exception: {}", ex.what());
  }
  report.checks.push_back(check);
  report.finalize();
  return report;
}

std::vector<StyleTestCase> select_cases(std::vector<StyleTestCase> cases, const CaseFilter& filter) {
  std::vector<StyleTestCase> out;
  for (auto& c : cases) {
    if (filter.style && c.style != *filter.style) continue;
    bool excluded = false;
    for (const auto& t : c.tags) excluded = excluded || filter.exclude_tags.count(t) > 0;
    if (excluded) continue;
    if (!filter.include_tags.empty()) {
      bool included = false;
      for (const auto& t : c.tags) included = included || filter.include_tags.count(t) > 0;
      if (!included) continue;
    }
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.test_id < b.test_id; });
  return out;
}

std::vector<CheckReport> run_suite(const std::vector<StyleTestCase>& cases, const TolerancePolicy& policy,
                                   const std::vector<Variant>& variants, int workers) {
  policy.validate();
  std::vector<CheckReport> out(cases.size() * variants.size());
  parallel_for(out.size(), workers, [&](std::size_t k) {
    out[k] = run_style_test(cases[k / variants.size()], policy, variants[k % variants.size()]);
  });
  return out;
}

std::string report_line(const CheckReport& r) {
  return fmt::format("TEST {} {} {} {:.6e}", r.test_id, variant_name(r.variant), status_name(r.overall),
                     r.worst_error);
}

std::string report_details(const CheckReport& r) {
  std::string out;
  for (const CheckResult& c : r.checks) {
    if (c.status != Status::fail) continue;
    out += fmt::format("  {} {} err={:.6e}", c.name, status_name(c.status), c.worst_error);
    if (c.index) out += fmt::format(" index={}", *c.index);
    if (!c.detail.empty()) out += fmt::format(" ({})", c.detail);
    out += '\n';
  }
  if (r.overall == Status::skip && !r.message.empty()) out += fmt::format("  skipped: {}\n", r.message);
  return out;
}

}  // namespace mdlite::harness

#pragma once

// Golden-file tests for pair styles. A test case describes how to build a
// small system and carries reference energies, virials and forces recorded
// on a trusted build.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mdlite/system.h"

namespace mdlite::harness {

/// |a-b| / max(|a|,|b|), or |a-b| when both magnitudes are below `floor`.
double rel_err(double a, double b, double floor);

struct TolerancePolicy {
  double global_epsilon = 1e-12;
  /// Applied to the effective epsilon for every variant other than plain.
  double variant_multiplier = 10.0;
  double floor = 1e-10;

  /// Throws std::invalid_argument unless everything is positive.
  void validate() const;
};

enum class Variant { plain, unrolled, half_list, full_list };
inline constexpr std::array<Variant, 4> all_variants{Variant::plain, Variant::unrolled, Variant::half_list,
                                                     Variant::full_list};
std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct ReferenceBlock {
  std::size_t n_atoms = 0;
  double init_energy = 0.0;
  std::array<double, 6> init_virial{};
  /// In atom-id order.
  std::vector<Vec3> init_forces;
  double run_energy = 0.0;
  std::array<double, 6> run_virial{};
  std::vector<Vec3> run_forces;
};

inline constexpr int fixture_schema = 1;
inline constexpr double min_case_epsilon = 1e-16;
inline constexpr double max_case_epsilon = 1e-2;

struct StyleTestCase {
  std::string test_id;
  std::string style;
  std::string engine_version;
  std::set<std::string> tags;
  std::optional<double> epsilon;
  int run_steps = 4;
  std::vector<std::string> pre_commands;
  /// Data file read after pre_commands, relative to the fixture; may be empty.
  std::string data_source;
  std::vector<std::string> style_setup;
  std::vector<std::string> post_commands;
  std::optional<ReferenceBlock> reference;

  /// Where the case was loaded from; relative paths resolve against its
  /// directory. Not serialized.
  std::string origin;

  std::string base_dir() const;
};

/// Strict: unknown keys, wrong shapes, a schema other than 1 or an epsilon
/// outside [1e-16, 1e-2] throw EngineError(E-PARSE).
StyleTestCase parse_case(std::string_view yaml, const std::string& origin = "fixture");
StyleTestCase load_case(const std::string& path);
/// All `*.yaml` files of a directory, sorted by test_id.
std::vector<StyleTestCase> load_cases(const std::string& dir);

/// Fixed key order, reals at 17 significant digits.
std::string emit_case(const StyleTestCase& c);

enum class Status { pass, fail, skip };
std::string_view status_name(Status s);

struct CheckResult {
  std::string name;
  Status status = Status::pass;
  double worst_error = 0.0;
  /// Atom (in id order) or component where the worst error occurred.
  std::optional<std::size_t> index;
  std::string detail;
};

struct CheckReport {
  std::string test_id;
  Variant variant = Variant::plain;
  std::vector<CheckResult> checks;
  Status overall = Status::pass;
  double worst_error = 0.0;
  /// Reason for a setup failure or a skip.
  std::string message;

  /// Sets overall and worst_error from the checks.
  void finalize();
};

/// Builds the system from the fragments and runs init, run, single,
/// restart and data checks.
CheckReport run_style_test(const StyleTestCase& c, const TolerancePolicy& policy, Variant variant);

/// Returns `c` with a freshly recorded reference block and the current
/// engine version. Throws EngineError when the system cannot be built.
StyleTestCase generate_reference(StyleTestCase c);

/// Passes iff executing `lines` fails, with `expected_code` when given. The
/// rendered error is stored in the report message.
CheckReport run_death_test(const std::optional<std::string>& expected_code, const std::vector<std::string>& lines);

struct CaseFilter {
  std::set<std::string> include_tags;
  std::set<std::string> exclude_tags;
  std::optional<std::string> style;
};

/// Sorted by test_id; exclusion wins over inclusion.
std::vector<StyleTestCase> select_cases(std::vector<StyleTestCase> cases, const CaseFilter& filter);

/// Every (case, variant) combination on `workers` threads. Results are in
/// case order, then variant order, independent of scheduling.
std::vector<CheckReport> run_suite(const std::vector<StyleTestCase>& cases, const TolerancePolicy& policy,
                                   const std::vector<Variant>& variants, int workers);

/// `TEST <id> <variant> PASS|FAIL|SKIP <worst_rel_err>`
std::string report_line(const CheckReport& r);
/// One indented line per failing check, for humans.
std::string report_details(const CheckReport& r);

}  // namespace mdlite::harness

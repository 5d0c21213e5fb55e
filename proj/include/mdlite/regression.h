#pragma once

// Regression runs over a corpus of complete example inputs with recorded
// thermo logs. Each example is a directory holding
//
//     input.in        engine input
//     reference.log   thermo header line, then one row per sample
//     meta.yaml       max_steps (<= 200) and optional tags
//
// Quick mode narrows the corpus to examples using styles or commands that a
// change touched, then caps the selection with a seeded random subset.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdlite/engine.h"
#include "mdlite/md.h"

namespace mdlite::regression {

inline constexpr int max_example_steps = 200;
inline constexpr std::size_t default_threshold = 50;

struct ExampleCase {
  /// Path relative to the corpus root, with `/` separators.
  std::string name;
  /// Directory on disk.
  std::string dir;
  std::set<std::string> tags;
  int max_steps = 0;
  std::string description;
  /// Commands (token 0) and pair style names used by the input.
  std::set<std::string> commands;
  std::set<std::string> styles;
  /// Set when the example cannot be used; the run reports it as a failure.
  std::string load_error;
};

/// Reads one example directory. Problems end up in `load_error` rather
/// than being thrown.
ExampleCase load_example(const std::string& dir, const std::string& name);
/// Every subdirectory (recursively) that holds an `input.in`, in path order.
std::vector<ExampleCase> scan_corpus(const std::string& root);

/// Command words and pair styles referenced by an input, following
/// `variable ... string` definitions. Lines that do not tokenize are ignored.
void collect_usage(const std::vector<LogicalLine>& lines, std::set<std::string>& commands,
                   std::set<std::string>& styles);

struct DiffMapping {
  /// Style and command names the changed files declare.
  std::set<std::string> names;
  /// Files that map to no known unit and are not documentation.
  std::vector<std::string> unknown_files;
  /// Documentation and other recognized non-code files.
  std::vector<std::string> non_code_files;
};

/// Maps changed file paths through the registry's and the command table's
/// source units. `src/pair/lj_cut.cpp` matches unit `pair/lj_cut`.
DiffMapping map_diff(const std::vector<std::string>& changed_files, const StyleRegistry& styles,
                     const CommandTable& commands);
std::set<std::string> styles_from_diff(const std::vector<std::string>& changed_files, const StyleRegistry& styles,
                                       const CommandTable& commands);

/// Examples using any of `names` as a command word or pair style, in path
/// order. An empty set selects the whole corpus.
std::vector<ExampleCase> match_examples(const std::vector<ExampleCase>& corpus, const std::set<std::string>& names);

/// Seeded sample of `threshold` examples without replacement, kept in the
/// input order. Throws std::invalid_argument when threshold < 1.
std::vector<ExampleCase> cap_selection(const std::vector<ExampleCase>& matched, std::size_t threshold,
                                       std::uint64_t seed);

enum class Mode { full, quick, none };

struct RegressionSelection {
  Mode mode = Mode::full;
  std::set<std::string> changed_names;
  std::vector<ExampleCase> matched;
  std::size_t threshold = default_threshold;
  std::uint64_t seed = 0;
  std::vector<ExampleCase> chosen;
  /// Why this mode was picked.
  std::string reason;
};

/// Quick mode from a file list: an empty list or any unknown file falls
/// back to the full corpus; a list of only non-code files selects nothing.
RegressionSelection select_examples(const std::vector<ExampleCase>& corpus,
                                    const std::optional<std::vector<std::string>>& changed_files,
                                    std::size_t threshold, std::uint64_t seed, const StyleRegistry& styles,
                                    const CommandTable& commands);

/// Per-column relative tolerances; `Step` is always exact.
struct ColumnTolerances {
  std::map<std::string, double> tol{{"Temp", 1e-4},   {"PotEng", 1e-6}, {"KinEng", 1e-6},
                                    {"TotEng", 1e-6}, {"Press", 1e-6}};
  double floor = 1e-10;
};

struct ExampleReport {
  std::string name;
  bool passed = false;
  std::size_t rows = 0;
  std::string message;
};

struct RunOptions {
  int workers = 1;
  ColumnTolerances tolerances;
  /// Rewrite reference.log from the produced thermo output instead of
  /// comparing.
  bool bless = false;
};

struct ThermoTable {
  std::vector<ThermoSample> rows;
};

/// Parses a reference log; the header must equal the engine's thermo
/// header. Throws EngineError(E-PARSE).
ThermoTable parse_thermo_log(std::string_view text, const std::string& origin);
/// Header plus rows, as the engine prints them.
std::string format_thermo_log(const std::vector<ThermoSample>& rows);

/// Runs one example in a fresh engine and compares its thermo output.
ExampleReport run_example(const ExampleCase& ex, const RunOptions& options);
/// Reports come back in the order of `chosen`, whatever the worker count.
std::vector<ExampleReport> run_regression(const std::vector<ExampleCase>& chosen, const RunOptions& options);

/// `EXAMPLE <name> PASS|FAIL[: message]`
std::string report_line(const ExampleReport& r);

}  // namespace mdlite::regression

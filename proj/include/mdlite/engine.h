#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mdlite/args.h"
#include "mdlite/md.h"
#include "mdlite/pair_style.h"
#include "mdlite/system.h"
#include "mdlite/tokenizer.h"

namespace mdlite {

class Engine;

/// Semantic version of the engine, e.g. `0.4.0`.
std::string_view engine_version();

struct CommandSpec {
  std::string name;
  std::size_t min_args = 0;
  std::size_t max_args = 0;
  std::string usage;
  /// Logical source unit, e.g. `cmd/velocity`.
  std::string source_unit;
  std::function<void(Engine&, const Args&)> handler;
};

/// Name -> handler map. Names are unique and lowercase.
class CommandTable {
 public:
  void add(CommandSpec spec);
  const CommandSpec* find(std::string_view name) const;
  std::vector<const CommandSpec*> list() const;
  std::optional<std::string> command_for_unit(std::string_view unit) const;

 private:
  std::map<std::string, CommandSpec, std::less<>> commands_;
};

/// The built-in command set, immutable after first use.
const CommandTable& builtin_commands();

enum class EchoMode { none, screen, log, both };

struct EngineOptions {
  /// Thermo and messages; nullptr for silence.
  std::ostream* screen = nullptr;
  /// Empty for no log file.
  std::string log_path;
  EchoMode echo = EchoMode::none;
  /// Relative file names in commands resolve against this directory.
  std::string base_dir;
  bool plugins_enabled = true;
  /// Upper bound on the total number of MD steps `run` may take.
  std::optional<std::int64_t> max_steps;
};

/// One simulation instance: state, style registry, variables and output
/// sinks. Not shared between threads.
class Engine {
 public:
  explicit Engine(EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Tokenizes and dispatches one line. Errors carry the line (before and
  /// after variable expansion) and `line_number`.
  void execute(std::string_view line, std::optional<int> line_number = std::nullopt);
  void execute_lines(const std::vector<LogicalLine>& lines);
  /// Relative paths inside resolve against the file's directory unless a
  /// base directory was configured.
  void run_file(const std::string& path);

  SystemState& state() { return state_; }
  const SystemState& state() const { return state_; }
  StyleRegistry& styles() { return styles_; }
  const StyleRegistry& styles() const { return styles_; }
  std::map<std::string, std::string>& variables() { return variables_; }
  const std::vector<ThermoSample>& thermo_log() const { return thermo_log_; }
  const EngineOptions& options() const { return options_; }
  std::int64_t steps_run() const { return steps_run_; }

  std::string resolve_path(std::string_view path) const;
  PairContext pair_context() const { return {&styles_, options_.base_dir}; }

  /// Energy, virial and forces at the current positions, computed on a copy
  /// so the state is not touched.
  ForceResult evaluate_forces() const;

  void print(std::string_view text);

  /// Used by the `run` command and the test harness.
  std::vector<ThermoSample> run(std::int64_t n);

  struct Region {
    Vec3 lo;
    Vec3 hi;
  };
  std::map<std::string, Region>& regions() { return regions_; }

  /// Loads a shared object that registers extra styles.
  void load_plugin(const std::string& path);

 private:
  void echo(std::string_view line);
  void write_log(std::string_view text);

  EngineOptions options_;
  std::ofstream log_;
  StyleRegistry styles_;
  SystemState state_;
  std::map<std::string, std::string> variables_;
  std::map<std::string, Region> regions_;
  std::vector<ThermoSample> thermo_log_;
  std::int64_t steps_run_ = 0;
  std::vector<void*> plugin_handles_;
};

}  // namespace mdlite

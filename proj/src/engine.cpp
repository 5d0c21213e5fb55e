#include "mdlite/engine.h"

#include <filesystem>

#include <fmt/format.h>

#include "mdlite/utils.h"

#ifdef MDLITE_HAVE_DLOPEN
#include <dlfcn.h>
#endif

namespace mdlite {

std::string_view engine_version() { return MDLITE_VERSION; }

void CommandTable::add(CommandSpec spec) {
  if (spec.name.empty() || utils::case_fold(spec.name, utils::Case::lower) != spec.name) {
    throw std::logic_error(fmt::format("command name '{}' must be lowercase", spec.name));
  }
  if (commands_.count(spec.name)) throw std::logic_error(fmt::format("command '{}' registered twice", spec.name));
  std::string key = spec.name;
  commands_.emplace(std::move(key), std::move(spec));
}

const CommandSpec* CommandTable::find(std::string_view name) const {
  auto it = commands_.find(name);
  return it == commands_.end() ? nullptr : &it->second;
}

std::vector<const CommandSpec*> CommandTable::list() const {
  std::vector<const CommandSpec*> out;
  for (const auto& [name, spec] : commands_) out.push_back(&spec);
  return out;
}

std::optional<std::string> CommandTable::command_for_unit(std::string_view unit) const {
  for (const auto& [name, spec] : commands_) {
    if (spec.source_unit == unit) return name;
  }
  return std::nullopt;
}

Engine::Engine(EngineOptions options) : options_(std::move(options)), styles_(builtin_styles()) {
  if (!options_.log_path.empty()) {
    log_.open(options_.log_path);
    if (!log_) throw EngineError(codes::io_failure, fmt::format("cannot open log file '{}'", options_.log_path));
  }
}

Engine::~Engine() {
  // plugin code must stay mapped until objects it created are gone
  state_.pair.reset();
  styles_ = StyleRegistry{};
#ifdef MDLITE_HAVE_DLOPEN
  for (void* h : plugin_handles_) dlclose(h);
#endif
}

void Engine::write_log(std::string_view text) {
  if (log_.is_open()) {
    log_ << text;
    log_.flush();
  }
}

void Engine::print(std::string_view text) {
  std::string line(text);
  line.push_back('\n');
  if (options_.screen) *options_.screen << line << std::flush;
  write_log(line);
}

void Engine::echo(std::string_view line) {
  std::string text(line);
  text.push_back('\n');
  if ((options_.echo == EchoMode::screen || options_.echo == EchoMode::both) && options_.screen) {
    *options_.screen << text << std::flush;
  }
  if (options_.echo == EchoMode::log || options_.echo == EchoMode::both) write_log(text);
}

void Engine::execute(std::string_view line, std::optional<int> line_number) {
  const std::string raw(line);
  std::optional<std::string> expanded;
  try {
    if (std::size_t bad = utils::first_non_ascii(raw); bad != std::string::npos) {
      throw EngineError(codes::non_ascii, "non-ASCII character in input", CaretSpan{bad, bad + 1});
    }
    // a comment may mention ${...} freely
    std::string body = utils::strip_comment(raw);
    std::string substituted = expand_variables(body, variables_) + raw.substr(body.size());
    expanded = substituted;
    TokenStream ts = tokenize(substituted, line_number.value_or(0));
    if (ts.empty()) return;
    echo(raw);

    const Token& word = ts[0];
    const CommandSpec* spec = builtin_commands().find(word.text);
    if (!spec) throw EngineError(codes::unknown_command, fmt::format("unknown command '{}'", word.text), word.span());
    Args args(std::span<const Token>(ts.tokens).subspan(1), word.span());
    args.expect_count(spec->min_args, spec->max_args, spec->usage);
    try {
      spec->handler(*this, args);
    } catch (EngineError& e) {
      // state errors point at the command itself
      if (!e.has_context() && !e.caret()) e.with_caret(word.span());
      throw;
    }
  } catch (EngineError& e) {
    if (!e.has_context()) e.with_context(raw, expanded, line_number);
    throw;
  } catch (const std::exception& ex) {
    EngineError e(codes::internal, ex.what());
    e.with_context(raw, expanded, line_number);
    throw e;
  }
}

void Engine::execute_lines(const std::vector<LogicalLine>& lines) {
  for (const LogicalLine& l : lines) execute(l.text, l.line_number);
}

void Engine::run_file(const std::string& path) {
  std::vector<LogicalLine> lines = read_logical_lines(path);
  const bool set_base = options_.base_dir.empty();
  if (set_base) options_.base_dir = std::filesystem::path(path).parent_path().string();
  try {
    execute_lines(lines);
  } catch (...) {
    if (set_base) options_.base_dir.clear();
    throw;
  }
  if (set_base) options_.base_dir.clear();
}

std::string Engine::resolve_path(std::string_view path) const { return utils::path_join(options_.base_dir, path); }

ForceResult Engine::evaluate_forces() const {
  SystemState copy = state_;
  return compute_forces(copy);
}

std::vector<ThermoSample> Engine::run(std::int64_t n) {
  if (options_.max_steps && steps_run_ + n > *options_.max_steps) {
    throw EngineError(codes::step_limit, fmt::format("run of {} steps exceeds the step limit of {} ({} already run)",
                                                     n, *options_.max_steps, steps_run_));
  }
  print(thermo_header);
  auto samples = run_steps(state_, n, state_.thermo_every, [this](const ThermoSample& s) {
    thermo_log_.push_back(s);
    print(format_thermo_row(s));
  });
  steps_run_ += n;
  return samples;
}

void Engine::load_plugin(const std::string& path) {
  if (!options_.plugins_enabled) {
    throw EngineError(codes::unsupported, "dynamic loading of plugins is disabled");
  }
#ifdef MDLITE_HAVE_DLOPEN
  void* handle = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (!handle) throw EngineError(codes::plugin_failure, fmt::format("cannot load plugin '{}': {}", path, dlerror()));
  using InitFn = void (*)(StyleRegistry*);
  auto init = reinterpret_cast<InitFn>(dlsym(handle, "mdlite_plugin_init"));
  if (!init) {
    dlclose(handle);
    throw EngineError(codes::plugin_failure, fmt::format("plugin '{}' has no mdlite_plugin_init symbol", path));
  }
  plugin_handles_.push_back(handle);
  init(&styles_);
#else
  (void)path;
  throw EngineError(codes::unsupported, "this build has no dynamic loading support");
#endif
}

}  // namespace mdlite

#include "mdlite/regression.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "mdlite/harness.h"
#include "mdlite/parallel.h"
#include "mdlite/random.h"
#include "mdlite/utils.h"

namespace fs = std::filesystem;

namespace mdlite::regression {

namespace {

void read_meta(const std::string& path, ExampleCase& ex) {
  YAML::Node root;
  try {
    root = YAML::Load(utils::read_file(path));
  } catch (const YAML::Exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path, e.msg));
  }
  if (!root.IsMap()) throw std::runtime_error(fmt::format("{}: expected a mapping", path));
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (key != "max_steps" && key != "tags" && key != "description") {
      throw std::runtime_error(fmt::format("{}: unknown key '{}'", path, key));
    }
  }
  if (!root["max_steps"]) throw std::runtime_error(fmt::format("{}: missing max_steps", path));
  std::int64_t steps = 0;
  try {
    steps = utils::parse_int(root["max_steps"].Scalar());
  } catch (const std::exception&) {
    throw std::runtime_error(fmt::format("{}: max_steps must be an integer", path));
  }
  if (steps < 0 || steps > max_example_steps) {
    throw std::runtime_error(
        fmt::format("{}: max_steps {} exceeds the limit of {} for regression examples", path, steps, max_example_steps));
  }
  ex.max_steps = static_cast<int>(steps);
  if (const YAML::Node tags = root["tags"]; tags && !tags.IsNull()) {
    if (!tags.IsSequence()) throw std::runtime_error(fmt::format("{}: tags must be a list", path));
    for (const auto& t : tags) ex.tags.insert(t.Scalar());
  }
  if (root["description"]) ex.description = root["description"].Scalar();
}

}  // namespace

void collect_usage(const std::vector<LogicalLine>& lines, std::set<std::string>& commands,
                   std::set<std::string>& styles) {
  std::map<std::string, std::string> vars;
  for (const LogicalLine& l : lines) {
    TokenStream ts;
    try {
      ts = tokenize(expand_variables(utils::strip_comment(l.text), vars), l.line_number);
    } catch (const EngineError&) {
      continue;
    }
    if (ts.empty()) continue;
    const std::string& word = ts[0].text;
    commands.insert(word);
    if (word == "variable" && ts.size() == 4 && ts[2].text == "string") vars[ts[1].text] = ts[3].text;
    if (word == "pair_style" && ts.size() >= 2) styles.insert(ts[1].text);
    // tabulated styles name their source style inline
    if (word == "pair_coeff" && ts.size() >= 8 && ts[3].text == "build") styles.insert(ts[7].text);
  }
}

ExampleCase load_example(const std::string& dir, const std::string& name) {
  ExampleCase ex;
  ex.name = name;
  ex.dir = dir;
  try {
    read_meta((fs::path(dir) / "meta.yaml").string(), ex);
    collect_usage(read_logical_lines((fs::path(dir) / "input.in").string()), ex.commands, ex.styles);
  } catch (const EngineError& e) {
    ex.load_error = e.message();
  } catch (const std::exception& e) {
    ex.load_error = e.what();
  }
  return ex;
}

std::vector<ExampleCase> scan_corpus(const std::string& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw EngineError(codes::io_failure, fmt::format("corpus '{}' does not exist", root));
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "input.in") dirs.push_back(entry.path().parent_path());
  }
  std::vector<ExampleCase> out;
  for (const auto& d : dirs) out.push_back(load_example(d.string(), fs::relative(d, root).generic_string()));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

namespace {

bool is_non_code(const std::string& path) {
  const std::string p = fs::path(path).generic_string();
  for (const char* dir : {"docs/", "doc/"}) {
    if (utils::starts_with(p, dir) || p.find(std::string("/") + dir) != std::string::npos) return true;
  }
  const std::string ext = fs::path(p).extension().string();
  return ext == ".md" || ext == ".rst" || ext == ".txt" || fs::path(p).filename() == "LICENSE";
}

/// Path without extension, matched by whole trailing components.
bool unit_matches(const std::string& path, std::string_view unit) {
  fs::path p(path);
  const std::string stem = (p.parent_path() / p.stem()).generic_string();
  if (stem == unit) return true;
  return stem.size() > unit.size() && utils::ends_with(stem, unit) && stem[stem.size() - unit.size() - 1] == '/';
}

}  // namespace

DiffMapping map_diff(const std::vector<std::string>& changed_files, const StyleRegistry& styles,
                     const CommandTable& commands) {
  DiffMapping out;
  for (const std::string& file : changed_files) {
    bool known = false;
    for (const StyleInfo* s : styles.list()) {
      if (!s->source_unit.empty() && unit_matches(file, s->source_unit)) {
        out.names.insert(s->name);
        known = true;
      }
    }
    for (const CommandSpec* c : commands.list()) {
      if (!c->source_unit.empty() && unit_matches(file, c->source_unit)) {
        out.names.insert(c->name);
        known = true;
      }
    }
    if (known) continue;
    if (is_non_code(file)) {
      out.non_code_files.push_back(file);
    } else {
      out.unknown_files.push_back(file);
    }
  }
  return out;
}

std::set<std::string> styles_from_diff(const std::vector<std::string>& changed_files, const StyleRegistry& styles,
                                       const CommandTable& commands) {
  return map_diff(changed_files, styles, commands).names;
}

std::vector<ExampleCase> match_examples(const std::vector<ExampleCase>& corpus, const std::set<std::string>& names) {
  if (names.empty()) return corpus;
  std::vector<ExampleCase> out;
  for (const ExampleCase& ex : corpus) {
    const bool uses = std::any_of(names.begin(), names.end(),
                                  [&](const std::string& n) { return ex.styles.count(n) || ex.commands.count(n); });
    if (uses) out.push_back(ex);
  }
  return out;
}

std::vector<ExampleCase> cap_selection(const std::vector<ExampleCase>& matched, std::size_t threshold,
                                       std::uint64_t seed) {
  if (threshold < 1) throw std::invalid_argument("selection threshold must be at least 1");
  if (matched.size() <= threshold) return matched;
  std::vector<std::size_t> idx(matched.size());
  std::iota(idx.begin(), idx.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < threshold; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(threshold);
  std::sort(idx.begin(), idx.end());
  std::vector<ExampleCase> out;
  for (std::size_t i : idx) out.push_back(matched[i]);
  return out;
}

RegressionSelection select_examples(const std::vector<ExampleCase>& corpus,
                                    const std::optional<std::vector<std::string>>& changed_files,
                                    std::size_t threshold, std::uint64_t seed, const StyleRegistry& styles,
                                    const CommandTable& commands) {
  RegressionSelection sel;
  sel.threshold = threshold;
  sel.seed = seed;
  if (!changed_files) {
    sel.mode = Mode::full;
    sel.reason = "full mode requested";
    sel.matched = corpus;
    sel.chosen = corpus;
    return sel;
  }
  const DiffMapping map = map_diff(*changed_files, styles, commands);
  sel.changed_names = map.names;
  if (changed_files->empty()) {
    sel.mode = Mode::full;
    sel.reason = "empty change list";
    sel.matched = corpus;
  } else if (!map.unknown_files.empty()) {
    sel.mode = Mode::full;
    sel.reason = fmt::format("{} changed file(s) map to no known unit, e.g. {}", map.unknown_files.size(),
                             map.unknown_files.front());
    sel.matched = corpus;
    sel.changed_names.clear();
  } else if (map.names.empty()) {
    sel.mode = Mode::none;
    sel.reason = "only documentation or other non-code files changed";
  } else {
    sel.mode = Mode::quick;
    sel.reason = fmt::format("changed: {}", utils::join({map.names.begin(), map.names.end()}));
    sel.matched = match_examples(corpus, map.names);
  }
  sel.chosen = sel.mode == Mode::full ? sel.matched : cap_selection(sel.matched, threshold, seed);
  if (sel.mode == Mode::quick && sel.matched.empty()) sel.chosen.clear();
  return sel;
}

// ---------------------------------------------------------------- running

namespace {

const char* const column_names[] = {"Step", "Temp", "PotEng", "KinEng", "TotEng", "Press"};

double column(const ThermoSample& s, int c) {
  switch (c) {
    case 1: return s.temperature;
    case 2: return s.potential_energy;
    case 3: return s.kinetic_energy;
    case 4: return s.total_energy;
    case 5: return s.pressure;
  }
  return static_cast<double>(s.step);
}

/// The values as they appear in a log, so a log compared with itself is exact.
ThermoSample as_logged(const ThermoSample& s) {
  ThermoTable t = parse_thermo_log(format_thermo_log({s}), "thermo");
  return t.rows.front();
}

}  // namespace

ThermoTable parse_thermo_log(std::string_view text, const std::string& origin) {
  ThermoTable out;
  bool header = false;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string line(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    const std::string trimmed = utils::trim_and_compress(line);
    if (trimmed.empty()) continue;
    if (!header) {
      if (trimmed != thermo_header) {
        EngineError e(codes::parse_failure,
                      fmt::format("{}: thermo header must be '{}'", origin, thermo_header));
        e.with_context(line, std::nullopt, lineno);
        throw e;
      }
      header = true;
      continue;
    }
    TokenStream ts = tokenize(line, lineno);
    if (ts.size() != 6) {
      EngineError e(codes::parse_failure, fmt::format("{}: expected 6 columns, found {}", origin, ts.size()));
      e.with_context(line, std::nullopt, lineno);
      throw e;
    }
    ThermoSample s;
    double v[6];
    for (int c = 0; c < 6; ++c) {
      try {
        if (c == 0) {
          s.step = utils::parse_int(ts[c].text);
        } else {
          v[c] = utils::parse_real(ts[c].text).value;
        }
      } catch (const utils::NotANumber&) {
        EngineError e(codes::parse_failure, fmt::format("{}: bad {} value '{}'", origin, column_names[c], ts[c].text),
                      ts[c].span());
        e.with_context(line, std::nullopt, lineno);
        throw e;
      }
    }
    s.temperature = v[1];
    s.potential_energy = v[2];
    s.kinetic_energy = v[3];
    s.total_energy = v[4];
    s.pressure = v[5];
    out.rows.push_back(s);
  }
  if (!header) throw EngineError(codes::parse_failure, fmt::format("{}: missing thermo header", origin));
  return out;
}

std::string format_thermo_log(const std::vector<ThermoSample>& rows) {
  std::string out = std::string(thermo_header) + "\n";
  for (const auto& r : rows) out += format_thermo_row(r) + "\n";
  return out;
}

ExampleReport run_example(const ExampleCase& ex, const RunOptions& options) {
  ExampleReport rep;
  rep.name = ex.name;
  if (!ex.load_error.empty()) {
    rep.message = ex.load_error;
    return rep;
  }
  std::vector<ThermoSample> produced;
  try {
    EngineOptions eo;
    eo.base_dir = ex.dir;
    eo.max_steps = ex.max_steps;
    Engine engine(eo);
    // inputs resolve files against their own directory; restarts and data
    // files written by examples stay inside it
    engine.run_file((fs::path(ex.dir) / "input.in").string());
    for (const auto& s : engine.thermo_log()) produced.push_back(as_logged(s));
  } catch (const EngineError& e) {
    rep.message = fmt::format("run failed: {} [{}]", e.message(), e.code());
    if (e.line_number()) rep.message += fmt::format(" at input line {}", *e.line_number());
    return rep;
  } catch (const std::exception& e) {
    rep.message = fmt::format("run failed: {}", e.what());
    return rep;
  }
  rep.rows = produced.size();

  const std::string log_path = (fs::path(ex.dir) / "reference.log").string();
  if (options.bless) {
    std::ofstream out(log_path, std::ios::binary);
    out << format_thermo_log(produced);
    rep.passed = static_cast<bool>(out);
    rep.message = rep.passed ? "reference written" : "cannot write reference.log";
    return rep;
  }
  if (ex.tags.count("no-compare")) {
    rep.passed = true;
    rep.message = "completed (no-compare)";
    return rep;
  }

  ThermoTable ref;
  try {
    ref = parse_thermo_log(utils::read_file(log_path), log_path);
  } catch (const EngineError& e) {
    rep.message = e.message();
    return rep;
  } catch (const std::exception& e) {
    rep.message = e.what();
    return rep;
  }
  if (ref.rows.size() != produced.size()) {
    rep.message = fmt::format("produced {} thermo rows, reference has {}", produced.size(), ref.rows.size());
    return rep;
  }
  for (std::size_t r = 0; r < produced.size(); ++r) {
    if (produced[r].step != ref.rows[r].step) {
      rep.message = fmt::format("row {} column Step: got {} expected {}", r + 1, produced[r].step, ref.rows[r].step);
      return rep;
    }
    for (int c = 1; c < 6; ++c) {
      const double got = column(produced[r], c);
      const double want = column(ref.rows[r], c);
      auto it = options.tolerances.tol.find(column_names[c]);
      const double tol = it == options.tolerances.tol.end() ? 0.0 : it->second;
      const double err = harness::rel_err(got, want, options.tolerances.floor);
      if (!(err <= tol)) {
        rep.message = fmt::format("row {} column {}: got {} expected {} (rel err {:.3e} > {:.1e})", r + 1,
                                  column_names[c], utils::format_thermo(got), utils::format_thermo(want), err, tol);
        return rep;
      }
    }
  }
  rep.passed = true;
  rep.message = fmt::format("{} rows match", produced.size());
  return rep;
}

std::vector<ExampleReport> run_regression(const std::vector<ExampleCase>& chosen, const RunOptions& options) {
  if (options.workers < 1) throw std::invalid_argument("workers must be at least 1");
  std::vector<ExampleReport> out(chosen.size());
  parallel_for(chosen.size(), options.workers, [&](std::size_t i) { out[i] = run_example(chosen[i], options); });
  return out;
}

std::string report_line(const ExampleReport& r) {
  return fmt::format("EXAMPLE {} {}{}{}", r.name, r.passed ? "PASS" : "FAIL", r.message.empty() ? "" : ": ",
                     r.message);
}

}  // namespace mdlite::regression

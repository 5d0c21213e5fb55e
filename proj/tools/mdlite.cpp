// Command-line driver: run inputs, run and record style tests, run the
// example regression corpus.
//
// Exit codes: 0 success, 1 test or run failure, 2 usage or setup problem.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mdlite/engine.h"
#include "mdlite/harness.h"
#include "mdlite/regression.h"
#include "mdlite/utils.h"

using namespace mdlite;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct RunArgs {
  std::string input;
  std::string log = "none";
  std::string echo = "none";
  std::vector<std::string> vars;
  bool no_plugins = false;
};

int do_run(const RunArgs& a) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(a.input, ec)) {
    std::cerr << fmt::format("ERROR: cannot open input file '{}' [{}]\n", a.input, codes::io_failure);
    return exit_usage;
  }
  EngineOptions o;
  o.screen = &std::cout;
  o.log_path = a.log == "none" ? "" : a.log;
  o.plugins_enabled = !a.no_plugins;
  const std::map<std::string, EchoMode> echo{
      {"none", EchoMode::none}, {"screen", EchoMode::screen}, {"log", EchoMode::log}, {"both", EchoMode::both}};
  o.echo = echo.at(a.echo);
  std::unique_ptr<Engine> engine;
  try {
    engine = std::make_unique<Engine>(o);
  } catch (const EngineError& e) {
    std::cerr << render_error(e);
    return exit_usage;
  }
  if (a.vars.size() % 2 != 0) {
    std::cerr << "--var takes a name and a value\n";
    return exit_usage;
  }
  for (std::size_t i = 0; i + 1 < a.vars.size(); i += 2) engine->variables()[a.vars[i]] = a.vars[i + 1];
  try {
    engine->run_file(a.input);
  } catch (const EngineError& e) {
    std::cout.flush();
    std::cerr << render_error(e);
    return e.code() == codes::io_failure && !e.has_context() ? exit_usage : exit_failure;
  }
  return exit_ok;
}

struct StyleTestArgs {
  std::string fixtures;
  std::vector<std::string> variants;
  bool all_variants = false;
  std::vector<std::string> include_tags;
  std::vector<std::string> exclude_tags;
  std::string style;
  std::optional<double> epsilon;
  double variant_multiplier = 10.0;
  int workers = 1;
  bool verbose = false;
};

int do_style_test(const StyleTestArgs& a) {
  using namespace harness;
  std::vector<StyleTestCase> cases;
  try {
    std::error_code ec;
    if (std::filesystem::is_regular_file(a.fixtures, ec)) {
      cases.push_back(load_case(a.fixtures));
    } else {
      cases = load_cases(a.fixtures);
    }
  } catch (const EngineError& e) {
    std::cerr << render_error(e);
    return exit_usage;
  }
  CaseFilter filter;
  filter.include_tags = {a.include_tags.begin(), a.include_tags.end()};
  filter.exclude_tags = {a.exclude_tags.begin(), a.exclude_tags.end()};
  if (!a.style.empty()) filter.style = a.style;
  cases = select_cases(std::move(cases), filter);

  std::vector<Variant> variants;
  if (a.all_variants) {
    variants.assign(all_variants.begin(), all_variants.end());
  } else if (a.variants.empty()) {
    variants.push_back(Variant::plain);
  } else {
    for (const auto& name : a.variants) {
      auto v = parse_variant(name);
      if (!v) {
        std::cerr << fmt::format("unknown variant '{}'\n", name);
        return exit_usage;
      }
      variants.push_back(*v);
    }
  }
  TolerancePolicy policy;
  if (a.epsilon) policy.global_epsilon = *a.epsilon;
  policy.variant_multiplier = a.variant_multiplier;
  try {
    policy.validate();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return exit_usage;
  }

  const auto reports = run_suite(cases, policy, variants, a.workers);
  int failed = 0, passed = 0, skipped = 0;
  for (const auto& r : reports) {
    std::cout << report_line(r) << '\n';
    if (r.overall == Status::fail || a.verbose) std::cout << report_details(r);
    if (r.overall == Status::fail) ++failed;
    if (r.overall == Status::pass) ++passed;
    if (r.overall == Status::skip) ++skipped;
  }
  std::cout << fmt::format("SUMMARY {} passed, {} failed, {} skipped\n", passed, failed, skipped);
  return failed ? exit_failure : exit_ok;
}

int do_gen_ref(const std::string& input, const std::string& output) {
  using namespace harness;
  try {
    StyleTestCase c = generate_reference(load_case(input));
    const std::string target = output.empty() ? input : output;
    std::ofstream out(target, std::ios::binary);
    if (!out) throw EngineError(codes::io_failure, fmt::format("cannot write '{}'", target));
    out << emit_case(c);
    std::cout << fmt::format("wrote {} ({} atoms)\n", target, c.reference->n_atoms);
  } catch (const EngineError& e) {
    std::cerr << render_error(e);
    return exit_usage;
  }
  return exit_ok;
}

struct RegressArgs {
  std::string corpus;
  std::vector<std::string> changed_files;
  bool changed_given = false;
  std::size_t threshold = regression::default_threshold;
  std::uint64_t seed = 0;
  int workers = 1;
  bool full = false;
  bool bless = false;
  std::vector<std::string> tolerances;
};

std::vector<std::string> expand_file_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    if (utils::starts_with(item, "@")) {
      const std::string text = utils::read_file(item.substr(1));
      for (const auto& w : utils::split_words(text)) out.push_back(w);
      continue;
    }
    std::size_t start = 0;
    while (start <= item.size()) {
      std::size_t comma = item.find(',', start);
      if (comma == std::string::npos) comma = item.size();
      const std::string part = utils::trim(item.substr(start, comma - start));
      if (!part.empty()) out.push_back(part);
      start = comma + 1;
    }
  }
  return out;
}

int do_regress(const RegressArgs& a) {
  using namespace regression;
  if (a.threshold < 1) {
    std::cerr << "--threshold must be at least 1\n";
    return exit_usage;
  }
  RunOptions run;
  run.workers = a.workers;
  run.bless = a.bless;
  for (const auto& t : a.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || !run.tolerances.tol.count(t.substr(0, eq))) {
      std::cerr << fmt::format("bad --tol '{}'; expected <column>=<value> for Temp, PotEng, KinEng, TotEng or Press\n", t);
      return exit_usage;
    }
    try {
      run.tolerances.tol[t.substr(0, eq)] = utils::parse_real(t.substr(eq + 1)).value;
    } catch (const std::exception&) {
      std::cerr << fmt::format("bad tolerance value in '{}'\n", t);
      return exit_usage;
    }
  }

  std::vector<ExampleCase> corpus;
  std::optional<std::vector<std::string>> changed;
  try {
    corpus = scan_corpus(a.corpus);
    if (!a.full && a.changed_given) changed = expand_file_list(a.changed_files);
  } catch (const EngineError& e) {
    std::cerr << render_error(e);
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return exit_usage;
  }
  const RegressionSelection sel =
      select_examples(corpus, changed, a.threshold, a.seed, builtin_styles(), builtin_commands());
  const char* mode = sel.mode == Mode::full ? "full" : sel.mode == Mode::quick ? "quick" : "none";
  std::cout << fmt::format("MODE {} ({})\n", mode, sel.reason);
  std::cout << fmt::format("{} selected of {} matched, corpus {}\n", sel.chosen.size(), sel.matched.size(),
                           corpus.size());
  const auto reports = run_regression(sel.chosen, run);
  int failed = 0;
  for (const auto& r : reports) {
    std::cout << report_line(r) << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << fmt::format("SUMMARY {} passed, {} failed\n", reports.size() - failed, failed);
  return failed ? exit_failure : exit_ok;
}

int do_styles() {
  for (const StyleInfo* s : builtin_styles().list()) {
    std::cout << fmt::format("{} {} {} {}\n", s->name, s->source_unit, s->supports_single ? "single" : "no-single",
                             s->summary);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdlite: small molecular dynamics engine with golden and regression test drivers"};
  app.require_subcommand(1, 1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "execute an input script");
  run->add_option("input", run_args.input, "input script")->required();
  run->add_option("-l,--log", run_args.log, "log file, or 'none'");
  run->add_option("-e,--echo", run_args.echo, "echo input lines")
      ->check(CLI::IsMember({"none", "screen", "log", "both"}));
  run->add_option("--var", run_args.vars, "preset a string variable: --var name value")->expected(2)->take_all();
  run->add_flag("--no-plugins", run_args.no_plugins, "make 'plugin load' fail");

  StyleTestArgs st;
  auto* style_test = app.add_subcommand("style-test", "compare pair styles against YAML references");
  style_test->add_option("fixtures", st.fixtures, "fixture directory or single fixture file")->required();
  style_test->add_option("--variant", st.variants, "plain, unrolled, half_list or full_list (repeatable)");
  style_test->add_flag("--all-variants", st.all_variants, "run every variant");
  style_test->add_option("--include-tag", st.include_tags, "only cases with this tag (repeatable)");
  style_test->add_option("--exclude-tag", st.exclude_tags, "skip cases with this tag (repeatable)");
  style_test->add_option("--style", st.style, "only cases for this style");
  style_test->add_option("--epsilon", st.epsilon, "global relative epsilon (default 1e-12)");
  style_test->add_option("--variant-multiplier", st.variant_multiplier, "epsilon factor for non-plain variants");
  style_test->add_option("-j,--workers", st.workers, "worker threads")->check(CLI::PositiveNumber);
  style_test->add_flag("-v,--verbose", st.verbose, "details for every case");

  std::string gen_in, gen_out;
  auto* gen_ref = app.add_subcommand("gen-ref", "record reference data for a fixture");
  gen_ref->add_option("case", gen_in, "fixture file")->required();
  gen_ref->add_option("-o,--output", gen_out, "write here instead of updating the fixture in place");

  RegressArgs rg;
  auto* regress = app.add_subcommand("regress", "run the example regression corpus");
  regress->add_option("corpus", rg.corpus, "corpus directory")->required();
  auto* changed_opt = regress->add_option("--changed-files", rg.changed_files,
                                          "changed paths, comma separated or @file (enables quick mode)");
  regress->add_option("--threshold", rg.threshold, "maximum number of examples in quick mode");
  regress->add_option("--seed", rg.seed, "seed for the random subset");
  regress->add_option("-j,--workers", rg.workers, "worker threads")->check(CLI::PositiveNumber);
  regress->add_flag("--full", rg.full, "ignore --changed-files and run everything");
  regress->add_flag("--bless", rg.bless, "rewrite reference logs from this build");
  regress->add_option("--tol", rg.tolerances, "per-column tolerance, e.g. PotEng=1e-8 (repeatable)");

  app.add_subcommand("styles", "list available pair styles");
  app.add_subcommand("version", "print the engine version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  rg.changed_given = changed_opt->count() > 0;

  try {
    if (*run) return do_run(run_args);
    if (*style_test) return do_style_test(st);
    if (*gen_ref) return do_gen_ref(gen_in, gen_out);
    if (*regress) return do_regress(rg);
    if (app.got_subcommand("styles")) return do_styles();
    if (app.got_subcommand("version")) {
      std::cout << "mdlite " << engine_version() << '\n';
      return exit_ok;
    }
  } catch (const std::exception& e) {
    std::cerr << "ERROR: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}

// Python extension: the flat library boundary plus the two test drivers.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdlite/engine.h"
#include "mdlite/harness.h"
#include "mdlite/library.h"
#include "mdlite/regression.h"

namespace py = pybind11;
using namespace mdlite;

namespace {

py::tuple last_error(mdlite_handle h) {
  mdlite_error e;
  mdlite_get_last_error(h, &e);
  return py::make_tuple(e.has_error != 0, std::string(e.code), std::string(e.message), std::string(e.rendered));
}

mdlite_handle open(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return mdlite_open(static_cast<int>(argv.size()), argv.data());
}

int command(mdlite_handle h, const std::string& line) {
  py::gil_scoped_release release;
  return mdlite_command(h, line.c_str());
}

int commands_string(mdlite_handle h, const std::string& text) {
  py::gil_scoped_release release;
  return mdlite_commands_string(h, text.c_str());
}

/// (status, value); value is None on failure.
py::tuple introspect(mdlite_handle h, const std::string& key) {
  mdlite_value v{};
  const int status = mdlite_introspect(h, key.c_str(), &v);
  py::object out = py::none();
  if (status == MDLITE_OK) {
    switch (v.kind) {
      case MDLITE_VALUE_INT: out = py::int_(v.integer); break;
      case MDLITE_VALUE_REAL: out = py::float_(v.real); break;
      case MDLITE_VALUE_BOOL: out = py::bool_(v.integer != 0); break;
      case MDLITE_VALUE_STRING: out = py::str(v.text); break;
      case MDLITE_VALUE_REALS: {
        py::list l;
        for (int k = 0; k < v.count; ++k) l.append(v.reals[k]);
        out = py::tuple(l);
        break;
      }
      default: break;
    }
  }
  return py::make_tuple(status, out);
}

/// (status, array copy or None).
py::tuple extract(mdlite_handle h, const std::string& name) {
  int64_t rows = 0;
  int cols = 0, is_int = 0;
  if (mdlite_extract_shape(h, name.c_str(), &rows, &cols, &is_int) != MDLITE_OK) {
    return py::make_tuple(MDLITE_FAILED, py::none());
  }
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (is_int) {
    py::array_t<int64_t> a(static_cast<py::ssize_t>(rows));
    const int s = mdlite_extract_int(h, name.c_str(), a.mutable_data(), n);
    return py::make_tuple(s, s == MDLITE_OK ? py::object(a) : py::none());
  }
  py::array_t<double> a({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  const int s = mdlite_extract_real(h, name.c_str(), a.mutable_data(), n);
  return py::make_tuple(s, s == MDLITE_OK ? py::object(a) : py::none());
}

py::tuple restart_bytes(mdlite_handle h) {
  size_t size = 0;
  if (mdlite_restart_bytes(h, nullptr, 0, &size) != MDLITE_OK) return py::make_tuple(MDLITE_FAILED, py::none());
  std::string buf(size, '\0');
  const int s = mdlite_restart_bytes(h, buf.data(), buf.size(), &size);
  return py::make_tuple(s, s == MDLITE_OK ? py::object(py::bytes(buf)) : py::none());
}

std::vector<harness::Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<harness::Variant> out;
  for (const auto& n : names) {
    auto v = harness::parse_variant(n);
    if (!v) throw std::invalid_argument("unknown variant '" + n + "'");
    out.push_back(*v);
  }
  return out;
}

py::list style_test(const std::string& fixtures, const std::vector<std::string>& variants,
                    std::optional<double> epsilon, double multiplier, int workers,
                    const std::vector<std::string>& include_tags, const std::vector<std::string>& exclude_tags) {
  harness::TolerancePolicy policy;
  if (epsilon) policy.global_epsilon = *epsilon;
  policy.variant_multiplier = multiplier;
  policy.validate();
  harness::CaseFilter filter{{include_tags.begin(), include_tags.end()}, {exclude_tags.begin(), exclude_tags.end()}, {}};
  const auto cases = harness::select_cases(harness::load_cases(fixtures), filter);
  std::vector<harness::CheckReport> reports;
  {
    py::gil_scoped_release release;
    reports = harness::run_suite(cases, policy, parse_variants(variants), workers);
  }
  py::list out;
  for (const auto& r : reports) {
    py::dict d;
    d["test_id"] = r.test_id;
    d["variant"] = std::string(harness::variant_name(r.variant));
    d["status"] = std::string(harness::status_name(r.overall));
    d["worst_error"] = r.worst_error;
    d["message"] = r.message;
    d["line"] = harness::report_line(r);
    out.append(d);
  }
  return out;
}

std::string generate_reference(const std::string& path) {
  return harness::emit_case(harness::generate_reference(harness::load_case(path)));
}

py::dict select_for(const std::string& corpus, std::optional<std::vector<std::string>> changed, std::size_t threshold,
                std::uint64_t seed) {
  const auto all = regression::scan_corpus(corpus);
  const auto sel = regression::select_examples(all, changed, threshold, seed, builtin_styles(), builtin_commands());
  auto names = [](const std::vector<regression::ExampleCase>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.name);
    return out;
  };
  py::dict d;
  d["mode"] = sel.mode == regression::Mode::full ? "full" : sel.mode == regression::Mode::quick ? "quick" : "none";
  d["reason"] = sel.reason;
  d["changed"] = sel.changed_names;
  d["matched"] = names(sel.matched);
  d["chosen"] = names(sel.chosen);
  return d;
}

py::list regress(const std::string& corpus, std::optional<std::vector<std::string>> changed, std::size_t threshold,
                 std::uint64_t seed, int workers) {
  const auto all = regression::scan_corpus(corpus);
  const auto sel = regression::select_examples(all, changed, threshold, seed, builtin_styles(), builtin_commands());
  regression::RunOptions opt;
  opt.workers = workers;
  std::vector<regression::ExampleReport> reports;
  {
    py::gil_scoped_release release;
    reports = regression::run_regression(sel.chosen, opt);
  }
  py::list out;
  for (const auto& r : reports) out.append(py::make_tuple(r.name, r.passed, r.message));
  return out;
}

}  // namespace

PYBIND11_MODULE(_mdlite, m) {
  m.doc() = "Native core of mdlite";
  m.attr("OK") = static_cast<int>(MDLITE_OK);
  m.attr("FAILED") = static_cast<int>(MDLITE_FAILED);

  m.def("open", &open, py::arg("args") = std::vector<std::string>{}, "New instance; 0 on bad flags");
  m.def("close", &mdlite_close);
  m.def("command", &command);
  m.def("commands_string", &commands_string);
  m.def("has_error", [](mdlite_handle h) { return mdlite_has_error(h) != 0; });
  m.def("get_last_error", &last_error, "(has_error, code, message, rendered); clears the slot");
  m.def("introspect", &introspect);
  m.def("extract", &extract);
  m.def("restart_bytes", &restart_bytes);
  m.def("version", [] { return std::string(mdlite_version()); });

  m.def("styles", [] {
    std::vector<std::string> out;
    for (const StyleInfo* s : builtin_styles().list()) out.push_back(s->name);
    return out;
  });
  m.def("rel_err", &harness::rel_err, py::arg("a"), py::arg("b"), py::arg("floor") = 1e-10);
  m.def("style_test", &style_test, py::arg("fixtures"), py::arg("variants") = std::vector<std::string>{"plain"},
        py::arg("epsilon") = py::none(), py::arg("multiplier") = 10.0, py::arg("workers") = 1,
        py::arg("include_tags") = std::vector<std::string>{}, py::arg("exclude_tags") = std::vector<std::string>{});
  m.def("generate_reference", &generate_reference, "Fixture text with a freshly recorded reference");
  m.def("select_examples", &select_for, py::arg("corpus"), py::arg("changed_files") = py::none(),
        py::arg("threshold") = regression::default_threshold, py::arg("seed") = 0);
  m.def("regress", &regress, py::arg("corpus"), py::arg("changed_files") = py::none(),
        py::arg("threshold") = regression::default_threshold, py::arg("seed") = 0, py::arg("workers") = 1);

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const EngineError& e) {
      PyErr_SetString(PyExc_RuntimeError, render_error(e).c_str());
    }
  });
}

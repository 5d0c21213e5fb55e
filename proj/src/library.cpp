#include "mdlite/library.h"

#include <cstring>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>

#include <fmt/format.h>

#include "mdlite/engine.h"
#include "mdlite/persist.h"
#include "mdlite/utils.h"

using namespace mdlite;

namespace {

struct ErrorSlot {
  bool has_error = false;
  std::string code;
  std::string message;
  std::string rendered;

  void clear() { *this = ErrorSlot{}; }
  void set(const EngineError& e) {
    has_error = true;
    code = e.code();
    message = e.message();
    rendered = render_error(e);
  }
};

struct Instance {
  std::mutex mutex;
  std::unique_ptr<Engine> engine;
  ErrorSlot error;
};

thread_local ErrorSlot global_error;

std::mutex table_mutex;
std::map<mdlite_handle, std::shared_ptr<Instance>> table;
mdlite_handle next_handle = 1;

std::shared_ptr<Instance> lookup(mdlite_handle h) {
  std::lock_guard<std::mutex> lock(table_mutex);
  auto it = table.find(h);
  return it == table.end() ? nullptr : it->second;
}

void copy_text(char* dst, std::size_t cap, const std::string& src) {
  const std::size_t n = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

/// Runs `fn(engine)` with the instance's slot reset first and set on failure.
template <class Fn>
int guarded_call(mdlite_handle h, Fn&& fn) {
  std::shared_ptr<Instance> inst = lookup(h);
  if (!inst) {
    global_error.clear();
    global_error.set(EngineError(codes::invalid_handle, fmt::format("invalid or closed handle {}", h)));
    return MDLITE_FAILED;
  }
  std::lock_guard<std::mutex> lock(inst->mutex);
  inst->error.clear();
  try {
    fn(*inst->engine);
    return MDLITE_OK;
  } catch (const EngineError& e) {
    inst->error.set(e);
  } catch (const std::exception& e) {
    inst->error.set(EngineError(codes::internal, e.what()));
  } catch (...) {
    inst->error.set(EngineError(codes::internal, "unknown failure"));
  }
  return MDLITE_FAILED;
}

enum class ArrayKind { real3, integer };

ArrayKind array_kind(const std::string& name) {
  if (name == "x" || name == "v" || name == "f") return ArrayKind::real3;
  if (name == "type" || name == "id") return ArrayKind::integer;
  throw EngineError(codes::unknown_array, fmt::format("unknown per-atom array '{}'", name));
}

}  // namespace

extern "C" {

mdlite_handle mdlite_open(int argc, const char* const* argv) {
  global_error.clear();
  try {
    EngineOptions o;
    std::map<std::string, std::string> vars;
    auto need = [&](int i, int count) {
      if (i + count >= argc || !argv) {
        throw EngineError(codes::bad_flag, fmt::format("flag '{}' needs {} value(s)", argv[i], count));
      }
    };
    for (int i = 0; i < argc; ++i) {
      const std::string flag = argv && argv[i] ? argv[i] : "";
      if (flag == "-log") {
        need(i, 1);
        const std::string v = argv[++i];
        o.log_path = v == "none" ? "" : v;
      } else if (flag == "-echo") {
        need(i, 1);
        const std::string v = argv[++i];
        if (v == "none") o.echo = EchoMode::none;
        else if (v == "screen") o.echo = EchoMode::screen;
        else if (v == "log") o.echo = EchoMode::log;
        else if (v == "both") o.echo = EchoMode::both;
        else throw EngineError(codes::bad_flag, fmt::format("bad -echo value '{}'", v));
      } else if (flag == "-screen") {
        need(i, 1);
        const std::string v = argv[++i];
        if (v == "stdout") o.screen = &std::cout;
        else if (v == "none") o.screen = nullptr;
        else throw EngineError(codes::bad_flag, fmt::format("bad -screen value '{}'", v));
      } else if (flag == "-plugins") {
        need(i, 1);
        const std::string v = argv[++i];
        if (v != "yes" && v != "no") throw EngineError(codes::bad_flag, fmt::format("bad -plugins value '{}'", v));
        o.plugins_enabled = v == "yes";
      } else if (flag == "-var") {
        need(i, 2);
        const std::string name = argv[i + 1];
        vars[name] = argv[i + 2];
        i += 2;
      } else {
        throw EngineError(codes::bad_flag, fmt::format("unknown flag '{}'", flag));
      }
    }
    auto inst = std::make_shared<Instance>();
    inst->engine = std::make_unique<Engine>(o);
    inst->engine->variables() = std::move(vars);
    std::lock_guard<std::mutex> lock(table_mutex);
    const mdlite_handle h = next_handle++;
    table.emplace(h, std::move(inst));
    return h;
  } catch (const EngineError& e) {
    global_error.set(e);
  } catch (const std::exception& e) {
    global_error.set(EngineError(codes::internal, e.what()));
  }
  return 0;
}

int mdlite_close(mdlite_handle h) {
  std::shared_ptr<Instance> inst;
  {
    std::lock_guard<std::mutex> lock(table_mutex);
    auto it = table.find(h);
    if (it == table.end()) return MDLITE_OK;
    inst = std::move(it->second);
    table.erase(it);
  }
  // wait for a call in flight on another thread
  std::lock_guard<std::mutex> lock(inst->mutex);
  inst->engine.reset();
  return MDLITE_OK;
}

int mdlite_command(mdlite_handle h, const char* line) {
  return guarded_call(h, [&](Engine& e) {
    if (!line) throw EngineError(codes::bad_argument, "null command line");
    e.execute(line);
  });
}

int mdlite_commands_string(mdlite_handle h, const char* text) {
  return guarded_call(h, [&](Engine& e) {
    if (!text) throw EngineError(codes::bad_argument, "null command text");
    e.execute_lines(split_logical_lines(text));
  });
}

int mdlite_has_error(mdlite_handle h) {
  if (h == 0) return global_error.has_error ? 1 : 0;
  std::shared_ptr<Instance> inst = lookup(h);
  if (!inst) return 1;
  std::lock_guard<std::mutex> lock(inst->mutex);
  return inst->error.has_error ? 1 : 0;
}

int mdlite_get_last_error(mdlite_handle h, mdlite_error* out) {
  ErrorSlot slot;
  if (h == 0) {
    slot = global_error;
    global_error.clear();
  } else if (std::shared_ptr<Instance> inst = lookup(h)) {
    std::lock_guard<std::mutex> lock(inst->mutex);
    slot = inst->error;
    inst->error.clear();
  } else {
    slot.set(EngineError(codes::invalid_handle, fmt::format("invalid or closed handle {}", h)));
  }
  if (!out) return slot.has_error ? 1 : 0;
  std::memset(out, 0, sizeof(*out));
  out->has_error = slot.has_error ? 1 : 0;
  copy_text(out->code, sizeof(out->code), slot.code);
  copy_text(out->message, sizeof(out->message), slot.message);
  copy_text(out->rendered, sizeof(out->rendered), slot.rendered);
  return out->has_error;
}

int mdlite_introspect(mdlite_handle h, const char* key_c, mdlite_value* out) {
  return guarded_call(h, [&](Engine& e) {
    if (!key_c || !out) throw EngineError(codes::bad_argument, "null key or output");
    const std::string key = key_c;
    mdlite_value v{};
    const SystemState& s = e.state();
    auto real = [&](double x) {
      v.kind = MDLITE_VALUE_REAL;
      v.real = x;
    };
    if (key == "natoms") {
      v.kind = MDLITE_VALUE_INT;
      v.integer = static_cast<int64_t>(s.natoms());
    } else if (key == "step") {
      v.kind = MDLITE_VALUE_INT;
      v.integer = s.step;
    } else if (key == "dt") {
      real(s.dt);
    } else if (key == "pe") {
      real(e.evaluate_forces().energy);
    } else if (key == "ke") {
      real(kinetic_energy(s));
    } else if (key == "press") {
      SystemState copy = s;
      real(make_sample(copy, compute_forces(copy)).pressure);
    } else if (key == "box") {
      const SimBox& box = s.require_box();
      v.kind = MDLITE_VALUE_REALS;
      v.count = 6;
      for (int d = 0; d < 3; ++d) {
        v.reals[2 * d] = box.lo[d];
        v.reals[2 * d + 1] = box.hi[d];
      }
    } else if (utils::starts_with(key, "has_style(") && utils::ends_with(key, ")")) {
      v.kind = MDLITE_VALUE_BOOL;
      v.integer = e.styles().contains(key.substr(10, key.size() - 11)) ? 1 : 0;
    } else if (key == "version") {
      v.kind = MDLITE_VALUE_STRING;
      copy_text(v.text, sizeof(v.text), std::string(engine_version()));
    } else {
      throw EngineError(codes::unknown_key, fmt::format("unknown introspection key '{}'", key));
    }
    *out = v;
  });
}

int mdlite_extract_shape(mdlite_handle h, const char* name, int64_t* rows, int* cols, int* is_integer) {
  return guarded_call(h, [&](Engine& e) {
    if (!name) throw EngineError(codes::bad_argument, "null array name");
    const ArrayKind k = array_kind(name);
    if (rows) *rows = static_cast<int64_t>(e.state().natoms());
    if (cols) *cols = k == ArrayKind::real3 ? 3 : 1;
    if (is_integer) *is_integer = k == ArrayKind::integer ? 1 : 0;
  });
}

int mdlite_extract_real(mdlite_handle h, const char* name, double* buffer, size_t capacity) {
  return guarded_call(h, [&](Engine& e) {
    if (!name) throw EngineError(codes::bad_argument, "null array name");
    const std::string n = name;
    if (array_kind(n) != ArrayKind::real3) {
      throw EngineError(codes::bad_argument, fmt::format("array '{}' holds integers", n));
    }
    const SystemState& s = e.state();
    if (capacity < 3 * s.natoms() || (!buffer && s.natoms() > 0)) {
      throw EngineError(codes::bad_argument, fmt::format("buffer needs {} elements", 3 * s.natoms()));
    }
    const std::vector<Vec3>& src = n == "x" ? s.x : n == "v" ? s.v : s.f;
    std::size_t k = 0;
    for (std::size_t i : s.id_order())
      for (int d = 0; d < 3; ++d) buffer[k++] = src[i][d];
  });
}

int mdlite_extract_int(mdlite_handle h, const char* name, int64_t* buffer, size_t capacity) {
  return guarded_call(h, [&](Engine& e) {
    if (!name) throw EngineError(codes::bad_argument, "null array name");
    const std::string n = name;
    if (array_kind(n) != ArrayKind::integer) {
      throw EngineError(codes::bad_argument, fmt::format("array '{}' holds reals", n));
    }
    const SystemState& s = e.state();
    if (capacity < s.natoms() || (!buffer && s.natoms() > 0)) {
      throw EngineError(codes::bad_argument, fmt::format("buffer needs {} elements", s.natoms()));
    }
    std::size_t k = 0;
    for (std::size_t i : s.id_order()) buffer[k++] = n == "id" ? s.id[i] : s.type[i];
  });
}

int mdlite_restart_bytes(mdlite_handle h, char* buffer, size_t capacity, size_t* size) {
  return guarded_call(h, [&](Engine& e) {
    const std::string bytes = write_restart(e.state());
    if (size) *size = bytes.size();
    if (!buffer) return;
    if (capacity < bytes.size()) throw EngineError(codes::bad_argument, fmt::format("buffer needs {} bytes", bytes.size()));
    std::memcpy(buffer, bytes.data(), bytes.size());
  });
}

const char* mdlite_version(void) { return MDLITE_VERSION; }

}  // extern "C"

#include "mdlite/persist.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "mdlite/tokenizer.h"
#include "mdlite/utils.h"

namespace mdlite {

CorruptRestart::CorruptRestart(std::size_t offset, std::string_view what)
    : EngineError(codes::corrupt_restart, fmt::format("corrupt restart data at byte {}: {}", offset, what)),
      offset_(offset) {}

void ByteReader::fail(std::size_t offset, std::string_view what) const { throw CorruptRestart(offset, what); }

namespace {

void section(ByteWriter& out, std::string_view tag, const ByteWriter& payload) {
  out.raw(tag);
  out.u64(payload.size());
  out.raw(payload.bytes());
}

}  // namespace

std::string write_restart(const SystemState& state) {
  ByteWriter out;
  out.raw(restart_magic);
  out.u32(restart_version);

  ByteWriter box;
  box.u8(state.box ? 1 : 0);
  if (state.box) {
    for (int d = 0; d < 3; ++d) box.f64(state.box->lo[d]);
    for (int d = 0; d < 3; ++d) box.f64(state.box->hi[d]);
    for (int d = 0; d < 3; ++d) box.u8(state.box->periodic[d] ? 1 : 0);
  }
  section(out, "BOX_", box);

  ByteWriter stat;
  stat.u8(static_cast<std::uint8_t>(state.units));
  stat.f64(state.dt);
  stat.i64(state.step);
  stat.u64(state.rng_seed);
  stat.i64(state.thermo_every);
  stat.f64(state.skin);
  stat.u8(state.neigh_mode == NeighborMode::full ? 1 : 0);
  stat.str(state.nve_fix);
  for (int d = 0; d < 3; ++d) stat.u8(state.periodic[d] ? 1 : 0);
  section(out, "STAT", stat);

  ByteWriter mass;
  mass.u32(static_cast<std::uint32_t>(state.ntypes));
  for (int t = 1; t <= state.ntypes; ++t) mass.f64(state.mass[t]);
  section(out, "MASS", mass);

  ByteWriter atoms;
  atoms.u64(state.natoms());
  for (std::size_t i = 0; i < state.natoms(); ++i) {
    atoms.i64(state.id[i]);
    atoms.u32(static_cast<std::uint32_t>(state.type[i]));
    for (int d = 0; d < 3; ++d) atoms.f64(state.x[i][d]);
    for (int d = 0; d < 3; ++d) atoms.f64(state.v[i][d]);
    for (int d = 0; d < 3; ++d) atoms.f64(state.f[i][d]);
  }
  section(out, "ATOM", atoms);

  if (state.pair) {
    ByteWriter pair;
    pair.str(state.pair->name());
    ByteWriter params;
    state.pair->write_params(params);
    pair.str(params.bytes());
    section(out, "PAIR", pair);
  }

  section(out, "END_", ByteWriter{});
  return out.take();
}

SystemState read_restart(std::string_view bytes, const StyleRegistry& styles) {
  ByteReader in(bytes);
  if (in.raw(4) != restart_magic) throw CorruptRestart(0, "bad magic");
  if (const std::uint32_t version = in.u32(); version != restart_version) {
    throw CorruptRestart(4, fmt::format("unsupported format version {}", version));
  }

  SystemState s;
  std::set<std::string> seen;
  bool ended = false;
  while (!ended) {
    const std::size_t header_at = in.offset();
    const std::string tag(in.raw(4));
    const std::uint64_t length = in.u64();
    if (length > in.remaining()) throw CorruptRestart(header_at, fmt::format("section {} overruns stream", tag));
    if (!seen.insert(tag).second) throw CorruptRestart(header_at, fmt::format("duplicate section {}", tag));
    const std::size_t payload_at = in.offset();
    ByteReader p(in.raw(length), payload_at);

    if (tag == "BOX_") {
      if (p.u8()) {
        SimBox box;
        for (int d = 0; d < 3; ++d) box.lo[d] = p.f64();
        for (int d = 0; d < 3; ++d) box.hi[d] = p.f64();
        for (int d = 0; d < 3; ++d) box.periodic[d] = p.u8() != 0;
        for (int d = 0; d < 3; ++d) {
          if (!(box.hi[d] > box.lo[d])) throw CorruptRestart(payload_at, "box bounds are not ordered");
        }
        s.box = box;
      }
    } else if (tag == "STAT") {
      const std::uint8_t units = p.u8();
      if (units != static_cast<std::uint8_t>(Units::lj)) throw CorruptRestart(payload_at, "unknown units");
      s.units = Units::lj;
      s.dt = p.f64();
      s.step = p.i64();
      s.rng_seed = p.u64();
      s.thermo_every = static_cast<int>(p.i64());
      s.skin = p.f64();
      s.neigh_mode = p.u8() ? NeighborMode::full : NeighborMode::half;
      s.nve_fix = p.str();
      for (int d = 0; d < 3; ++d) s.periodic[d] = p.u8() != 0;
    } else if (tag == "MASS") {
      const std::uint32_t nt = p.u32();
      if (nt > p.remaining() / 8) throw CorruptRestart(payload_at, "type count exceeds section");
      s.ntypes = static_cast<int>(nt);
      s.mass.assign(nt + 1, 1.0);
      for (std::uint32_t t = 1; t <= nt; ++t) s.mass[t] = p.f64();
    } else if (tag == "ATOM") {
      const std::uint64_t n = p.u64();
      constexpr std::size_t per_atom = 8 + 4 + 9 * 8;
      if (n > p.remaining() / per_atom) throw CorruptRestart(payload_at, "atom count exceeds section");
      for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t atom_at = p.offset();
        const std::int64_t atom_id = p.i64();
        const std::uint32_t atom_type = p.u32();
        if (atom_type < 1 || static_cast<int>(atom_type) > s.ntypes) throw CorruptRestart(atom_at, "atom type out of range");
        Vec3 x{}, v{}, f{};
        for (int d = 0; d < 3; ++d) x[d] = p.f64();
        for (int d = 0; d < 3; ++d) v[d] = p.f64();
        for (int d = 0; d < 3; ++d) f[d] = p.f64();
        s.add_atom(atom_id, static_cast<int>(atom_type), x, v);
        s.f.back() = f;
      }
    } else if (tag == "PAIR") {
      const std::string name = p.str();
      const std::size_t params_at = p.offset() + 8;
      const std::string params = p.str();
      const StyleInfo* info = styles.find(name);
      if (!info) throw EngineError(codes::unknown_style, fmt::format("restart uses unknown pair style {}", name));
      s.pair = info->factory();
      ByteReader pr(params, params_at);
      s.pair->read_params(pr);
      if (!pr.at_end()) throw CorruptRestart(pr.offset(), "trailing bytes in pair parameters");
    } else if (tag == "END_") {
      ended = true;
    } else {
      throw CorruptRestart(header_at, fmt::format("unknown section '{}'", tag));
    }
    if (!p.at_end()) throw CorruptRestart(p.offset(), fmt::format("section {} has trailing bytes", tag));
  }
  if (!in.at_end()) throw CorruptRestart(in.offset(), "data after end marker");
  for (const char* required : {"BOX_", "STAT", "MASS", "ATOM"}) {
    if (!seen.count(required)) throw CorruptRestart(in.offset(), fmt::format("missing section {}", required));
  }
  if (s.box) s.periodic = s.box->periodic;
  return s;
}

std::string write_data(const SystemState& state) {
  const SimBox& box = state.require_box();
  std::string out = "mdlite data file\n\n";
  out += fmt::format("{} atoms\n{} atom types\n\n", state.natoms(), state.ntypes);
  const char* names[3] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    out += fmt::format("{} {} {}lo {}hi\n", utils::format_exact(box.lo[d]), utils::format_exact(box.hi[d]), names[d],
                       names[d]);
  }
  out += "\nMasses\n\n";
  for (int t = 1; t <= state.ntypes; ++t) out += fmt::format("{} {}\n", t, utils::format_exact(state.mass[t]));
  const auto order = state.id_order();
  out += "\nAtoms\n\n";
  for (std::size_t i : order) {
    out += fmt::format("{} {} {} {} {}\n", state.id[i], state.type[i], utils::format_exact(state.x[i][0]),
                       utils::format_exact(state.x[i][1]), utils::format_exact(state.x[i][2]));
  }
  out += "\nVelocities\n\n";
  for (std::size_t i : order) {
    out += fmt::format("{} {} {} {}\n", state.id[i], utils::format_exact(state.v[i][0]),
                       utils::format_exact(state.v[i][1]), utils::format_exact(state.v[i][2]));
  }
  return out;
}

namespace {

struct DataLine {
  TokenStream tokens;
  std::string text;
  int number;
};

class DataParser {
 public:
  DataParser(std::string_view text, std::string origin) : origin_(std::move(origin)) {
    // the first line is a free-form title
    std::size_t nl = text.find('\n');
    std::string_view body = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    for (LogicalLine& l : split_logical_lines(body)) {
      const int number = l.line_number + 1;
      lines_.push_back({tokenize(l.text, number), l.text, number});
    }
  }

  [[noreturn]] void fail(const DataLine& line, std::size_t tok, std::string message) const {
    EngineError e(codes::parse_failure, fmt::format("{}: {}", origin_, message));
    if (tok < line.tokens.size()) e.with_caret(line.tokens[tok].span());
    e.with_context(line.text, std::nullopt, line.number);
    throw e;
  }
  [[noreturn]] void fail(std::string message) const {
    throw EngineError(codes::parse_failure, fmt::format("{}: {}", origin_, message));
  }

  double real(const DataLine& line, std::size_t tok) const {
    if (tok >= line.tokens.size()) fail(line, tok, "missing value");
    try {
      return utils::parse_real(line.tokens[tok].text).value;
    } catch (const utils::NotANumber&) {
      fail(line, tok, fmt::format("expected a number but found '{}'", line.tokens[tok].text));
    }
  }
  std::int64_t integer(const DataLine& line, std::size_t tok) const {
    if (tok >= line.tokens.size()) fail(line, tok, "missing value");
    try {
      return utils::parse_int(line.tokens[tok].text);
    } catch (const utils::NotANumber&) {
      fail(line, tok, fmt::format("expected an integer but found '{}'", line.tokens[tok].text));
    }
  }

  void parse(SystemState& state) {
    std::int64_t natoms = -1;
    std::int64_t ntypes = -1;
    std::array<bool, 3> have_bounds{};
    SimBox box;
    box.periodic = state.periodic;

    std::size_t k = 0;
    auto is_section = [](const DataLine& l) {
      return l.tokens.size() == 1 &&
             (l.tokens[0].text == "Masses" || l.tokens[0].text == "Atoms" || l.tokens[0].text == "Velocities");
    };
    for (; k < lines_.size() && !is_section(lines_[k]); ++k) {
      const DataLine& l = lines_[k];
      const auto& t = l.tokens.tokens;
      if (t.size() == 2 && t[1].text == "atoms") {
        natoms = integer(l, 0);
        if (natoms < 0) fail(l, 0, "atom count must not be negative");
      } else if (t.size() == 3 && t[1].text == "atom" && t[2].text == "types") {
        ntypes = integer(l, 0);
        if (ntypes < 1) fail(l, 0, "need at least one atom type");
      } else if (t.size() == 4 && t[2].text.size() == 3 && t[2].text.substr(1) == "lo" &&
                 t[3].text == t[2].text.substr(0, 1) + "hi" && std::string("xyz").find(t[2].text[0]) != std::string::npos) {
        const int d = static_cast<int>(std::string("xyz").find(t[2].text[0]));
        box.lo[d] = real(l, 0);
        box.hi[d] = real(l, 1);
        if (!(box.hi[d] > box.lo[d])) fail(l, 1, "upper bound must exceed lower bound");
        have_bounds[d] = true;
      } else {
        fail(l, 0, fmt::format("unrecognized header line '{}'", l.text));
      }
    }
    if (natoms < 0) fail("missing 'atoms' header line");
    if (ntypes < 0) fail("missing 'atom types' header line");
    for (int d = 0; d < 3; ++d) {
      if (!have_bounds[d]) fail(fmt::format("missing {}lo {}hi header line", "xyz"[d], "xyz"[d]));
    }

    std::vector<double> mass(static_cast<std::size_t>(ntypes) + 1, 1.0);
    struct AtomRow {
      std::int64_t id;
      int type;
      Vec3 x;
    };
    std::vector<AtomRow> atoms;
    std::vector<std::pair<std::int64_t, Vec3>> velocities;
    std::set<std::string> seen;

    while (k < lines_.size()) {
      const DataLine& header = lines_[k];
      if (!is_section(header)) fail(header, 0, fmt::format("expected a section keyword but found '{}'", header.text));
      const std::string name = header.tokens[0].text;
      if (!seen.insert(name).second) fail(header, 0, fmt::format("duplicate {} section", name));
      ++k;
      const std::int64_t rows = name == "Masses" ? ntypes : natoms;
      for (std::int64_t r = 0; r < rows; ++r, ++k) {
        if (k >= lines_.size() || is_section(lines_[k])) {
          fail(header, 0, fmt::format("{} section has {} rows, expected {}", name, r, rows));
        }
        const DataLine& l = lines_[k];
        if (name == "Masses") {
          if (l.tokens.size() != 2) fail(l, std::min<std::size_t>(l.tokens.size(), 2), "expected 'type mass'");
          const std::int64_t t = integer(l, 0);
          if (t < 1 || t > ntypes) fail(l, 0, fmt::format("atom type {} is outside 1..{}", t, ntypes));
          const double m = real(l, 1);
          if (!(m > 0.0)) fail(l, 1, "mass must be positive");
          mass[t] = m;
        } else if (name == "Atoms") {
          if (l.tokens.size() != 5) fail(l, std::min<std::size_t>(l.tokens.size(), 5), "expected 'id type x y z'");
          AtomRow a{};
          a.id = integer(l, 0);
          if (a.id < 1) fail(l, 0, "atom ids must be positive");
          const std::int64_t t = integer(l, 1);
          if (t < 1 || t > ntypes) fail(l, 1, fmt::format("atom type {} is outside 1..{}", t, ntypes));
          a.type = static_cast<int>(t);
          for (int d = 0; d < 3; ++d) a.x[d] = real(l, 2 + d);
          atoms.push_back(a);
        } else {
          if (l.tokens.size() != 4) fail(l, std::min<std::size_t>(l.tokens.size(), 4), "expected 'id vx vy vz'");
          Vec3 v{};
          const std::int64_t id = integer(l, 0);
          for (int d = 0; d < 3; ++d) v[d] = real(l, 1 + d);
          velocities.emplace_back(id, v);
        }
      }
    }
    if (!seen.count("Atoms")) fail("missing Atoms section");

    std::set<std::int64_t> ids;
    for (const auto& a : atoms) {
      if (!ids.insert(a.id).second) fail(fmt::format("duplicate atom id {}", a.id));
    }

    state.box = box;
    state.ntypes = static_cast<int>(ntypes);
    state.mass = std::move(mass);
    state.id.clear();
    state.type.clear();
    state.x.clear();
    state.v.clear();
    state.f.clear();
    for (const auto& a : atoms) {
      Vec3 x = a.x;
      box.wrap(x);
      state.add_atom(a.id, a.type, x);
    }
    if (!velocities.empty()) {
      std::map<std::int64_t, std::size_t> index;
      for (std::size_t i = 0; i < state.natoms(); ++i) index[state.id[i]] = i;
      for (const auto& [id, v] : velocities) {
        auto it = index.find(id);
        if (it == index.end()) fail(fmt::format("velocity for unknown atom id {}", id));
        state.v[it->second] = v;
      }
    }
  }

 private:
  std::string origin_;
  std::vector<DataLine> lines_;
};

}  // namespace

void read_data(std::string_view text, SystemState& state, const std::string& origin) {
  DataParser parser(text, origin);
  parser.parse(state);
}

}  // namespace mdlite

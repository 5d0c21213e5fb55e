#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mdlite/pair_styles.h"
#include "mdlite/tokenizer.h"
#include "mdlite/utils.h"

namespace mdlite {

PairTerm InterpolationTable::lookup(double r_squared) const {
  if (r_squared < rsq.front()) {
    throw EngineError(codes::table_range,
                      fmt::format("pair distance {} is inside the table inner limit {}", std::sqrt(r_squared),
                                  std::sqrt(rsq.front())));
  }
  const std::size_t n = rsq.size();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(rsq.begin(), rsq.end(), r_squared) - rsq.begin()) - 1;
  if (k >= n - 1) return {energy[n - 1], fpair[n - 1]};
  const double frac = (r_squared - rsq[k]) / (rsq[k + 1] - rsq[k]);
  return {energy[k] + frac * (energy[k + 1] - energy[k]), fpair[k] + frac * (fpair[k + 1] - fpair[k])};
}

InterpolationTable tabulate(const PairStyle& source, int ti, int tj, int n_points, double r_min, double cutoff) {
  if (n_points < 2) throw EngineError(codes::bad_range, fmt::format("table needs at least 2 points, got {}", n_points));
  if (!(r_min > 0.0) || !(cutoff > r_min)) {
    throw EngineError(codes::bad_range, fmt::format("table range [{}, {}] is invalid", r_min, cutoff));
  }
  InterpolationTable t;
  t.rsq.resize(n_points);
  t.energy.resize(n_points);
  t.fpair.resize(n_points);
  const double inner = r_min * r_min;
  const double outer = cutoff * cutoff;
  const double delta = (outer - inner) / (n_points - 1);
  for (int k = 0; k < n_points; ++k) {
    t.rsq[k] = k == n_points - 1 ? outer : inner + k * delta;
    const PairTerm p = source.eval(ti, tj, t.rsq[k]);
    t.energy[k] = p.energy;
    t.fpair[k] = p.fpair;
  }
  return t;
}

InterpolationTable parse_table(std::string_view text, const std::string& origin) {
  InterpolationTable t;
  std::int64_t expected = -1;
  std::int64_t last_index = 0;
  for (const LogicalLine& line : split_logical_lines(text)) {
    TokenStream ts = tokenize(line.text, line.line_number);
    auto fail = [&](std::size_t tok, std::string message) -> void {
      EngineError e(codes::parse_failure, fmt::format("{}: {}", origin, message));
      if (tok < ts.size()) e.with_caret(ts[tok].span());
      e.with_context(line.text, std::nullopt, line.line_number);
      throw e;
    };
    auto number = [&](std::size_t tok) {
      try {
        return utils::parse_real(ts[tok].text).value;
      } catch (const utils::NotANumber&) {
        fail(tok, fmt::format("expected a number but found '{}'", ts[tok].text));
      }
      return 0.0;
    };
    if (expected < 0) {
      if (ts.size() != 2 || ts[0].text != "N") fail(0, "expected header 'N <count>'");
      try {
        expected = utils::parse_int(ts[1].text);
      } catch (const utils::NotANumber&) {
        fail(1, fmt::format("invalid point count '{}'", ts[1].text));
      }
      if (expected < 2) fail(1, "a table needs at least 2 points");
      continue;
    }
    if (ts.size() != 4) fail(ts.size() < 4 ? ts.size() : 4, "expected 'index r energy force'");
    std::int64_t index = 0;
    try {
      index = utils::parse_int(ts[0].text);
    } catch (const utils::NotANumber&) {
      fail(0, fmt::format("invalid row index '{}'", ts[0].text));
    }
    if (index != last_index + 1) fail(0, fmt::format("row index {} out of sequence", index));
    last_index = index;
    const double r = number(1);
    const double e = number(2);
    const double force = number(3);
    if (!(r > 0.0)) fail(1, "r must be positive");
    const double rsq = r * r;
    if (!t.rsq.empty() && !(rsq > t.rsq.back())) fail(1, "r values must be strictly increasing");
    if (static_cast<std::int64_t>(t.rsq.size()) >= expected) fail(0, "more rows than declared");
    t.rsq.push_back(rsq);
    t.energy.push_back(e);
    t.fpair.push_back(force / r);
  }
  if (expected < 0) throw EngineError(codes::parse_failure, fmt::format("{}: missing 'N <count>' header", origin));
  if (static_cast<std::int64_t>(t.rsq.size()) != expected) {
    throw EngineError(codes::parse_failure,
                      fmt::format("{}: declared {} rows but found {}", origin, expected, t.rsq.size()));
  }
  return t;
}

InterpolationTable read_table_file(const std::string& path) {
  std::string text;
  try {
    text = utils::read_file(path);
  } catch (const std::exception& ex) {
    throw EngineError(codes::io_failure, ex.what());
  }
  return parse_table(text, path);
}

namespace pair {

namespace {

class Table : public PairStyle {
 public:
  Table() : PairStyle("table") {}

  std::unique_ptr<PairStyle> clone() const override { return std::make_unique<Table>(*this); }
  bool has_single() const override { return false; }

  void settings(const Args& args) override { args.expect_count(0, 0, "pair_style table"); }

  /// pair_coeff i j file <path>
  /// pair_coeff i j build <n_points> <r_min> <cutoff> <style> <style coeffs...>
  void coeff(const Args& args, int ntypes, const PairContext& ctx) override {
    if (args.size() < 3) args.fail_command(codes::arg_count, "usage: pair_coeff <i> <j> file|build ...");
    const auto [ilo, ihi] = args.type_range(0, ntypes, "atom type");
    const auto [jlo, jhi] = args.type_range(1, ntypes, "atom type");
    InterpolationTable table;
    const std::string& mode = args.word(2);
    if (mode == "file") {
      args.expect_count(4, 4, "pair_coeff <i> <j> file <path>");
      table = read_table_file(utils::path_join(ctx.base_dir, args.word(3)));
    } else if (mode == "build") {
      if (args.size() < 7) {
        args.fail_command(codes::arg_count,
                          "usage: pair_coeff <i> <j> build <n_points> <r_min> <cutoff> <style> <coeffs...>");
      }
      const std::int64_t n_points = args.integer(3, "point count");
      if (n_points < 2) args.fail(3, codes::bad_range, "a table needs at least 2 points");
      const double r_min = args.positive_real(4, "inner radius");
      const double cutoff = args.positive_real(5, "cutoff");
      if (!(cutoff > r_min)) args.fail(5, codes::bad_range, "table cutoff must exceed the inner radius");
      if (!ctx.registry) args.fail(6, codes::unknown_style, "no style registry available");
      if (args.word(6) == name()) args.fail(6, codes::bad_argument, "a table cannot be built from itself");
      const StyleInfo* info = ctx.registry->find(args.word(6));
      if (!info) args.fail(6, codes::unknown_style, fmt::format("unknown pair style {}", args.word(6)));

      std::unique_ptr<PairStyle> source = info->factory();
      std::vector<Token> cut_token{args.token(5)};
      source->settings(Args(cut_token, args.token(6).span()));
      std::vector<Token> source_args{args.token(0), args.token(1)};
      source_args[0].text = "1";
      source_args[1].text = "1";
      for (std::size_t k = 7; k < args.size(); ++k) source_args.push_back(args.token(k));
      source->coeff(Args(source_args, args.token(6).span()), 1, ctx);
      source->init(1);
      table = tabulate(*source, 1, 1, static_cast<int>(n_points), r_min, cutoff);
    } else {
      args.fail(2, codes::bad_argument, fmt::format("expected 'file' or 'build' but found '{}'", mode));
    }
    coeffs_.resize(ntypes);
    for (int i = ilo; i <= ihi; ++i) {
      for (int j = jlo; j <= jhi; ++j) coeffs_.set(i, j, table);
    }
  }

  void init(int ntypes) override {
    coeffs_.resize(ntypes);
    max_cut_ = 0.0;
    for (int i = 1; i <= ntypes; ++i) {
      for (int j = 1; j <= ntypes; ++j) {
        if (!coeffs_.is_set(i, j)) {
          throw EngineError(codes::missing_coeff,
                            fmt::format("pair coefficients for types {} {} are not set", std::min(i, j),
                                        std::max(i, j)));
        }
        max_cut_ = std::max(max_cut_, std::sqrt(coeffs_.at(i, j).outer_rsq()));
      }
    }
  }

  double cutoff() const override { return max_cut_; }
  double cutsq(int ti, int tj) const override { return coeffs_.at(ti, tj).outer_rsq(); }
  PairTerm eval(int ti, int tj, double rsq) const override { return coeffs_.at(ti, tj).lookup(rsq); }

  void set_table(int ti, int tj, InterpolationTable t) {
    coeffs_.resize(std::max({coeffs_.ntypes(), ti, tj}));
    coeffs_.set(ti, tj, std::move(t));
  }

  void write_params(ByteWriter& out) const override {
    const int n = coeffs_.ntypes();
    out.u32(static_cast<std::uint32_t>(n));
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        out.u8(coeffs_.is_set(i, j) ? 1 : 0);
        if (!coeffs_.is_set(i, j)) continue;
        const InterpolationTable& t = coeffs_.at(i, j);
        out.f64s(t.rsq);
        out.f64s(t.energy);
        out.f64s(t.fpair);
      }
    }
  }

  void read_params(ByteReader& in) override {
    const std::size_t at = in.offset();
    const std::uint32_t n = in.u32();
    if (n > 10000) in.fail(at, "implausible type count");
    coeffs_ = {};
    coeffs_.resize(static_cast<int>(n));
    for (int i = 1; i <= static_cast<int>(n); ++i) {
      for (int j = i; j <= static_cast<int>(n); ++j) {
        if (in.u8() == 0) continue;
        const std::size_t start = in.offset();
        InterpolationTable t;
        t.rsq = in.f64s();
        t.energy = in.f64s();
        t.fpair = in.f64s();
        if (t.rsq.size() < 2 || t.energy.size() != t.rsq.size() || t.fpair.size() != t.rsq.size()) {
          in.fail(start, "inconsistent table arrays");
        }
        coeffs_.set(i, j, std::move(t));
      }
    }
  }

 private:
  CoeffTable<InterpolationTable> coeffs_;
  double max_cut_ = 0.0;
};

}  // namespace

}  // namespace pair

std::unique_ptr<PairStyle> make_table() { return std::make_unique<pair::Table>(); }

std::unique_ptr<PairStyle> table_build(const PairStyle& source, int ntypes, int n_points, double r_min,
                                       double cutoff) {
  auto table = std::make_unique<pair::Table>();
  for (int i = 1; i <= ntypes; ++i) {
    for (int j = i; j <= ntypes; ++j) table->set_table(i, j, tabulate(source, i, j, n_points, r_min, cutoff));
  }
  table->init(ntypes);
  return table;
}

}  // namespace mdlite

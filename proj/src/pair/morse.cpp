#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mdlite/pair_styles.h"

namespace mdlite::pair {

namespace {

/// E = D0 [exp(-2 alpha (r - r0)) - 2 exp(-alpha (r - r0))]. No mixing: every
/// type pair needs an explicit pair_coeff.
class Morse : public PairStyle {
 public:
  Morse() : PairStyle("morse") {}

  std::unique_ptr<PairStyle> clone() const override { return std::make_unique<Morse>(*this); }

  void settings(const Args& args) override {
    args.expect_count(1, 1, "pair_style morse <cutoff>");
    cut_global_ = args.positive_real(0, "cutoff");
  }

  void coeff(const Args& args, int ntypes, const PairContext&) override {
    args.expect_count(5, 6, "pair_coeff <i> <j> <D0> <alpha> <r0> [cutoff]");
    const auto [ilo, ihi] = args.type_range(0, ntypes, "atom type");
    const auto [jlo, jhi] = args.type_range(1, ntypes, "atom type");
    Params p{};
    p.d0 = args.nonnegative_real(2, "D0");
    p.alpha = args.positive_real(3, "alpha");
    p.r0 = args.positive_real(4, "r0");
    p.cut = args.size() == 6 ? args.positive_real(5, "cutoff") : -1.0;
    coeffs_.resize(ntypes);
    for (int i = ilo; i <= ihi; ++i) {
      for (int j = jlo; j <= jhi; ++j) coeffs_.set(i, j, p);
    }
  }

  void init(int ntypes) override {
    coeffs_.resize(ntypes);
    stride_ = static_cast<std::size_t>(ntypes) + 1;
    table_.assign(stride_ * stride_, Derived{});
    max_cut_ = 0.0;
    for (int i = 1; i <= ntypes; ++i) {
      for (int j = 1; j <= ntypes; ++j) {
        if (!coeffs_.is_set(i, j)) {
          throw EngineError(codes::missing_coeff,
                            fmt::format("pair coefficients for types {} {} are not set", std::min(i, j),
                                        std::max(i, j)));
        }
        const Params& p = coeffs_.at(i, j);
        Derived& d = table_[i * stride_ + j];
        d.p = p;
        const double cut = p.cut > 0.0 ? p.cut : cut_global_;
        d.cutsq = cut * cut;
        d.offset = 0.0;
        if (shift_) d.offset = evaluate(d, d.cutsq).energy;
        max_cut_ = std::max(max_cut_, cut);
      }
    }
  }

  void set_shift(bool shift) override { shift_ = shift; }

  double cutoff() const override { return max_cut_; }
  double cutsq(int ti, int tj) const override { return table_[ti * stride_ + tj].cutsq; }
  PairTerm eval(int ti, int tj, double rsq) const override { return evaluate(table_[ti * stride_ + tj], rsq); }

  void write_params(ByteWriter& out) const override {
    out.f64(cut_global_);
    out.u8(shift_ ? 1 : 0);
    const int n = coeffs_.ntypes();
    out.u32(static_cast<std::uint32_t>(n));
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        out.u8(coeffs_.is_set(i, j) ? 1 : 0);
        if (!coeffs_.is_set(i, j)) continue;
        const Params& p = coeffs_.at(i, j);
        out.f64(p.d0);
        out.f64(p.alpha);
        out.f64(p.r0);
        out.f64(p.cut);
      }
    }
  }

  void read_params(ByteReader& in) override {
    cut_global_ = in.f64();
    shift_ = in.u8() != 0;
    const std::size_t at = in.offset();
    const std::uint32_t n = in.u32();
    if (n > 10000) in.fail(at, "implausible type count");
    coeffs_ = {};
    coeffs_.resize(static_cast<int>(n));
    for (int i = 1; i <= static_cast<int>(n); ++i) {
      for (int j = i; j <= static_cast<int>(n); ++j) {
        if (in.u8() == 0) continue;
        Params p{};
        p.d0 = in.f64();
        p.alpha = in.f64();
        p.r0 = in.f64();
        p.cut = in.f64();
        coeffs_.set(i, j, p);
      }
    }
  }

 private:
  struct Params {
    double d0;
    double alpha;
    double r0;
    double cut;  // < 0: global
  };
  struct Derived {
    Params p{};
    double cutsq = 0.0;
    double offset = 0.0;
  };

  static PairTerm evaluate(const Derived& d, double rsq) {
    const double r = std::sqrt(rsq);
    const double dexp = std::exp(-d.p.alpha * (r - d.p.r0));
    const double energy = d.p.d0 * (dexp * dexp - 2.0 * dexp) - d.offset;
    const double force = 2.0 * d.p.alpha * d.p.d0 * (dexp * dexp - dexp);
    return {energy, force / r};
  }

  double cut_global_ = 0.0;
  CoeffTable<Params> coeffs_;
  std::size_t stride_ = 0;
  double max_cut_ = 0.0;
  std::vector<Derived> table_;
};

}  // namespace

}  // namespace mdlite::pair

namespace mdlite {
std::unique_ptr<PairStyle> make_morse() { return std::make_unique<pair::Morse>(); }
}  // namespace mdlite

// Loadable example style: E = A (1 + cos(pi r / rc)) for r < rc, one A for
// every type pair.

#include <cmath>

#include "mdlite/args.h"
#include "mdlite/binary_io.h"
#include "mdlite/pair_style.h"

namespace {

class Soft : public mdlite::PairStyle {
 public:
  Soft() : PairStyle("soft") {}

  std::unique_ptr<PairStyle> clone() const override { return std::make_unique<Soft>(*this); }

  void settings(const mdlite::Args& args) override {
    args.expect_count(1, 1, "pair_style soft <cutoff>");
    cut_ = args.positive_real(0, "cutoff");
  }
  void coeff(const mdlite::Args& args, int ntypes, const mdlite::PairContext&) override {
    args.expect_count(3, 3, "pair_coeff <i> <j> <A>");
    args.type_range(0, ntypes, "atom type");
    args.type_range(1, ntypes, "atom type");
    prefactor_ = args.nonnegative_real(2, "A");
  }
  void init(int) override {}

  double cutoff() const override { return cut_; }
  double cutsq(int, int) const override { return cut_ * cut_; }
  mdlite::PairTerm eval(int, int, double rsq) const override {
    const double r = std::sqrt(rsq);
    const double arg = M_PI * r / cut_;
    return {prefactor_ * (1.0 + std::cos(arg)), prefactor_ * M_PI / cut_ * std::sin(arg) / r};
  }

  void write_params(mdlite::ByteWriter& out) const override {
    out.f64(cut_);
    out.f64(prefactor_);
  }
  void read_params(mdlite::ByteReader& in) override {
    cut_ = in.f64();
    prefactor_ = in.f64();
  }

 private:
  double cut_ = 1.0;
  double prefactor_ = 0.0;
};

}  // namespace

extern "C" void mdlite_plugin_init(mdlite::StyleRegistry* registry) {
  registry->register_style({"soft", [] { return std::make_unique<Soft>(); }, true, "plugin/soft",
                            "cosine soft repulsion (plugin)"});
}

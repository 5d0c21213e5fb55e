#include "lj_cut.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mdlite::pair {

void LJCut::settings(const Args& args) {
  args.expect_count(1, 1, "pair_style lj/cut <cutoff>");
  cut_global_ = args.positive_real(0, "cutoff");
}

void LJCut::coeff(const Args& args, int ntypes, const PairContext&) {
  args.expect_count(4, 5, "pair_coeff <i> <j> <epsilon> <sigma> [cutoff]");
  const auto [ilo, ihi] = args.type_range(0, ntypes, "atom type");
  const auto [jlo, jhi] = args.type_range(1, ntypes, "atom type");
  Params p{};
  p.epsilon = args.nonnegative_real(2, "epsilon");
  p.sigma = args.positive_real(3, "sigma");
  p.cut_given = args.size() == 5;
  p.cut = p.cut_given ? args.positive_real(4, "cutoff") : 0.0;
  coeffs_.resize(ntypes);
  for (int i = ilo; i <= ihi; ++i) {
    for (int j = jlo; j <= jhi; ++j) coeffs_.set(i, j, p);
  }
}

void LJCut::init(int ntypes) {
  coeffs_.resize(ntypes);
  coeffs_.clear_implicit();
  for (int i = 1; i <= ntypes; ++i) {
    if (!coeffs_.is_set(i, i)) {
      throw EngineError(codes::missing_coeff, fmt::format("pair coefficients for types {} {} are not set", i, i));
    }
  }
  for (int i = 1; i <= ntypes; ++i) {
    for (int j = i + 1; j <= ntypes; ++j) {
      if (coeffs_.is_set(i, j)) continue;
      const Params& a = coeffs_.at(i, i);
      const Params& b = coeffs_.at(j, j);
      const double cut_a = a.cut_given ? a.cut : cut_global_;
      const double cut_b = b.cut_given ? b.cut : cut_global_;
      Params m{};
      m.epsilon = std::sqrt(a.epsilon * b.epsilon);
      m.sigma = 0.5 * (a.sigma + b.sigma);
      m.cut_given = a.cut_given || b.cut_given;
      m.cut = 0.5 * (cut_a + cut_b);
      coeffs_.set(i, j, m, false);
    }
  }

  stride_ = static_cast<std::size_t>(ntypes) + 1;
  const std::size_t n = stride_ * stride_;
  cutsq_.assign(n, 0.0);
  lj1_.assign(n, 0.0);
  lj2_.assign(n, 0.0);
  lj3_.assign(n, 0.0);
  lj4_.assign(n, 0.0);
  offset_.assign(n, 0.0);
  max_cut_ = 0.0;
  for (int i = 1; i <= ntypes; ++i) {
    for (int j = 1; j <= ntypes; ++j) {
      const Params& p = coeffs_.at(i, j);
      const double cut = p.cut_given ? p.cut : cut_global_;
      const std::size_t k = slot(i, j);
      cutsq_[k] = cut * cut;
      const double s6 = std::pow(p.sigma, 6.0);
      const double s12 = s6 * s6;
      lj1_[k] = 48.0 * p.epsilon * s12;
      lj2_[k] = 24.0 * p.epsilon * s6;
      lj3_[k] = 4.0 * p.epsilon * s12;
      lj4_[k] = 4.0 * p.epsilon * s6;
      if (shift_) {
        offset_[k] = 0.0;
        offset_[k] = kernel(k, cutsq_[k]).energy;
      }
      max_cut_ = std::max(max_cut_, cut);
    }
  }
}

void LJCut::write_params(ByteWriter& out) const {
  out.f64(cut_global_);
  out.u8(shift_ ? 1 : 0);
  const int n = coeffs_.ntypes();
  out.u32(static_cast<std::uint32_t>(n));
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      const bool given = coeffs_.is_set(i, j) && coeffs_.is_explicit(i, j);
      out.u8(given ? 1 : 0);
      if (!given) continue;
      const Params& p = coeffs_.at(i, j);
      out.f64(p.epsilon);
      out.f64(p.sigma);
      out.f64(p.cut);
      out.u8(p.cut_given ? 1 : 0);
    }
  }
}

void LJCut::read_params(ByteReader& in) {
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
      p.epsilon = in.f64();
      p.sigma = in.f64();
      p.cut = in.f64();
      p.cut_given = in.u8() != 0;
      coeffs_.set(i, j, p);
    }
  }
}

}  // namespace mdlite::pair

namespace mdlite {
std::unique_ptr<PairStyle> make_lj_cut() { return std::make_unique<pair::LJCut>(); }
}  // namespace mdlite

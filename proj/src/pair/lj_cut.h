#pragma once

#include <vector>

#include "mdlite/pair_style.h"

namespace mdlite::pair {

/// 12-6 Lennard-Jones: E = 4 eps [(sigma/r)^12 - (sigma/r)^6] inside the cutoff.
/// Unset cross terms mix geometrically in epsilon and arithmetically in
/// sigma and cutoff.
class LJCut : public PairStyle {
 public:
  LJCut() : LJCut("lj/cut") {}

  std::unique_ptr<PairStyle> clone() const override { return std::make_unique<LJCut>(*this); }
  void settings(const Args& args) override;
  void coeff(const Args& args, int ntypes, const PairContext& ctx) override;
  void init(int ntypes) override;
  void set_shift(bool shift) override { shift_ = shift; }

  double cutoff() const override { return max_cut_; }
  double cutsq(int ti, int tj) const override { return cutsq_[slot(ti, tj)]; }
  PairTerm eval(int ti, int tj, double rsq) const override { return kernel(slot(ti, tj), rsq); }

  void write_params(ByteWriter& out) const override;
  void read_params(ByteReader& in) override;

 protected:
  explicit LJCut(std::string name) : PairStyle(std::move(name)) {}

  struct Params {
    double epsilon;
    double sigma;
    double cut;
    bool cut_given;
  };

  std::size_t slot(int ti, int tj) const { return static_cast<std::size_t>(ti) * stride_ + tj; }

  PairTerm kernel(std::size_t k, double rsq) const {
    const double r2inv = 1.0 / rsq;
    const double r6inv = r2inv * r2inv * r2inv;
    const double forcelj = r6inv * (lj1_[k] * r6inv - lj2_[k]);
    return {r6inv * (lj3_[k] * r6inv - lj4_[k]) - offset_[k], forcelj * r2inv};
  }

  double cut_global_ = 0.0;
  CoeffTable<Params> coeffs_;

  std::size_t stride_ = 0;
  double max_cut_ = 0.0;
  std::vector<double> cutsq_, lj1_, lj2_, lj3_, lj4_, offset_;
};

}  // namespace mdlite::pair

#include "lj_cut.h"

#include "mdlite/neighbor.h"
#include "mdlite/system.h"

namespace mdlite::pair {

namespace {

/// lj/cut with the neighbor loop unrolled by four into independent
/// accumulators. Same per-pair arithmetic, different summation order.
class LJCutUnrolled : public LJCut {
 public:
  LJCutUnrolled() : LJCut("lj/cut/unrolled") {}

  std::unique_ptr<PairStyle> clone() const override { return std::make_unique<LJCutUnrolled>(*this); }

  ForceResult compute(SystemState& state, const NeighborList& list) const override {
    const SimBox& box = state.require_box();
    const bool half = list.mode == NeighborMode::half;
    const double weight = half ? 1.0 : 0.5;
    for (auto& f : state.f) f = {0.0, 0.0, 0.0};

    constexpr int width = 4;
    ForceResult out;
    for (std::size_t i = 0; i < state.natoms(); ++i) {
      const Vec3& xi = state.x[i];
      const int ti = state.type[i];
      const auto& row = list.neighbors[i];

      double fx[width] = {}, fy[width] = {}, fz[width] = {};
      double e[width] = {};
      double w[width][6] = {};

      for (std::size_t base = 0; base < row.size(); base += width) {
        const std::size_t lanes = std::min<std::size_t>(width, row.size() - base);
        for (std::size_t lane = 0; lane < lanes; ++lane) {
          const std::size_t j = row[base + lane].j;
          Vec3 del{xi[0] - state.x[j][0], xi[1] - state.x[j][1], xi[2] - state.x[j][2]};
          box.minimum_image(del);
          const double rsq = del[0] * del[0] + del[1] * del[1] + del[2] * del[2];
          const std::size_t k = slot(ti, state.type[j]);
          if (rsq >= cutsq_[k]) continue;
          const PairTerm t = kernel(k, rsq);
          fx[lane] += del[0] * t.fpair;
          fy[lane] += del[1] * t.fpair;
          fz[lane] += del[2] * t.fpair;
          if (half) {
            state.f[j][0] -= del[0] * t.fpair;
            state.f[j][1] -= del[1] * t.fpair;
            state.f[j][2] -= del[2] * t.fpair;
          }
          e[lane] += t.energy;
          w[lane][0] += del[0] * del[0] * t.fpair;
          w[lane][1] += del[1] * del[1] * t.fpair;
          w[lane][2] += del[2] * del[2] * t.fpair;
          w[lane][3] += del[0] * del[1] * t.fpair;
          w[lane][4] += del[0] * del[2] * t.fpair;
          w[lane][5] += del[1] * del[2] * t.fpair;
        }
      }

      state.f[i][0] += (fx[0] + fx[1]) + (fx[2] + fx[3]);
      state.f[i][1] += (fy[0] + fy[1]) + (fy[2] + fy[3]);
      state.f[i][2] += (fz[0] + fz[1]) + (fz[2] + fz[3]);
      out.energy += weight * ((e[0] + e[1]) + (e[2] + e[3]));
      for (int c = 0; c < 6; ++c) out.virial[c] += weight * ((w[0][c] + w[1][c]) + (w[2][c] + w[3][c]));
    }
    return out;
  }
};

}  // namespace

}  // namespace mdlite::pair

namespace mdlite {
std::unique_ptr<PairStyle> make_lj_cut_unrolled() { return std::make_unique<pair::LJCutUnrolled>(); }
}  // namespace mdlite

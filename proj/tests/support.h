#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mdlite/md.h"
#include "mdlite/pair_style.h"
#include "mdlite/random.h"
#include "mdlite/system.h"
#include "mdlite/tokenizer.h"
#include "mdlite/utils.h"

namespace mdlite::testing {

inline const StyleRegistry& registry() {
  static const StyleRegistry r = builtin_styles();
  return r;
}

/// `style_line` is what follows `pair_style`, each coeff line what follows
/// `pair_coeff`.
inline void bind_style(SystemState& s, const std::string& style_line, const std::vector<std::string>& coeffs) {
  TokenStream st = tokenize(style_line);
  s.pair = registry().create(st[0].text);
  s.pair->settings(Args(std::span<const Token>(st.tokens).subspan(1), {}));
  for (const auto& c : coeffs) {
    TokenStream ct = tokenize(c);
    s.pair->coeff(Args(ct.tokens, {}), s.ntypes, PairContext{&registry(), ""});
  }
  s.pair->init(s.ntypes);
}

inline SystemState empty_state(double length, int ntypes = 1, std::array<bool, 3> periodic = {true, true, true}) {
  SystemState s;
  SimBox box;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {length, length, length};
  box.periodic = periodic;
  s.box = box;
  s.periodic = periodic;
  s.ntypes = ntypes;
  s.mass.assign(ntypes + 1, 1.0);
  return s;
}

/// Uniform random positions with a minimum pair separation, for configurations
/// where finite differences stay well conditioned.
inline SystemState random_state(std::uint64_t seed, int n, double length, double min_sep, int ntypes = 1) {
  SystemState s = empty_state(length, ntypes);
  SplitMix64 rng(seed);
  int next_id = 1;
  while (static_cast<int>(s.natoms()) < n) {
    Vec3 x{rng.uniform() * length, rng.uniform() * length, rng.uniform() * length};
    bool ok = true;
    for (const auto& y : s.x) {
      Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
      s.box->minimum_image(d);
      if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < min_sep * min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) s.add_atom(next_id++, 1 + static_cast<int>(rng.below(ntypes)), x);
  }
  return s;
}

/// FCC lattice of `cells`^3 cubic cells with lattice constant `a`.
inline SystemState fcc_state(int cells, double a) {
  SystemState s = empty_state(cells * a);
  const double basis[4][3] = {{0, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
  int id = 1;
  for (int k = 0; k < cells; ++k)
    for (int j = 0; j < cells; ++j)
      for (int i = 0; i < cells; ++i)
        for (const auto& b : basis) s.add_atom(id++, 1, {(i + b[0]) * a, (j + b[1]) * a, (k + b[2]) * a});
  return s;
}

inline double rel(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

}  // namespace mdlite::testing

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mdlite/pair_style.h"

namespace mdlite {

std::unique_ptr<PairStyle> make_lj_cut();
std::unique_ptr<PairStyle> make_lj_cut_unrolled();
std::unique_ptr<PairStyle> make_morse();
std::unique_ptr<PairStyle> make_table();

/// Knots in r^2 with energy and F/r at each; linear interpolation in r^2.
struct InterpolationTable {
  std::vector<double> rsq;
  std::vector<double> energy;
  std::vector<double> fpair;

  double inner_rsq() const { return rsq.front(); }
  double outer_rsq() const { return rsq.back(); }
  /// Throws E-TABLE-RANGE below the first knot. Knots are reproduced exactly.
  PairTerm lookup(double r_squared) const;
};

/// Samples `source` (already init()ed) for types (ti, tj) at `n_points`
/// knots evenly spaced in r^2 over [r_min^2, cutoff^2]. Throws E-BAD-RANGE.
InterpolationTable tabulate(const PairStyle& source, int ti, int tj, int n_points, double r_min, double cutoff);

/// A `table` style whose every type pair is tabulated from `source`.
std::unique_ptr<PairStyle> table_build(const PairStyle& source, int ntypes, int n_points, double r_min,
                                       double cutoff);

/// Table file: an `N <count>` header followed by `index r energy force`
/// rows with strictly increasing r. `#` comments and blank lines allowed.
InterpolationTable read_table_file(const std::string& path);
InterpolationTable parse_table(std::string_view text, const std::string& origin);

}  // namespace mdlite

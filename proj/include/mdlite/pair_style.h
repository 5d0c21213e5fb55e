#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdlite/args.h"
#include "mdlite/binary_io.h"
#include "mdlite/error.h"

namespace mdlite {

struct SystemState;
struct NeighborList;
class StyleRegistry;

/// Energy and force-over-distance for one pair: the force on atom i is
/// `fpair * (x_i - x_j)`.
struct PairTerm {
  double energy = 0.0;
  double fpair = 0.0;
};

/// Accumulated energy and virial (xx, yy, zz, xy, xz, yz).
struct ForceResult {
  double energy = 0.0;
  std::array<double, 6> virial{};
};

/// Things coeff() may need beyond its arguments.
struct PairContext {
  const StyleRegistry* registry = nullptr;
  std::string base_dir;
};

/// A pairwise interaction model. The engine drives the life cycle:
/// settings() once from `pair_style`, coeff() once per `pair_coeff`, then
/// init() before every force evaluation sequence.
class PairStyle {
 public:
  explicit PairStyle(std::string name) : name_(std::move(name)) {}
  virtual ~PairStyle() = default;

  const std::string& name() const { return name_; }
  virtual std::unique_ptr<PairStyle> clone() const = 0;

  /// `args` excludes the style name.
  virtual void settings(const Args& args) = 0;
  /// `args` starts with the two type fields.
  virtual void coeff(const Args& args, int ntypes, const PairContext& ctx) = 0;
  /// Validates that every type pair has parameters and derives mixed and
  /// cached coefficients. Throws E-MISSING-COEFF.
  virtual void init(int ntypes) = 0;

  /// `pair_modify shift yes|no`. Only styles that support shifting accept it.
  virtual void set_shift(bool shift);
  bool shifted() const { return shift_; }

  virtual double cutoff() const = 0;
  virtual double cutsq(int ti, int tj) const = 0;
  virtual PairTerm eval(int ti, int tj, double rsq) const = 0;

  virtual bool has_single() const { return true; }
  /// Throws E-UNSUPPORTED when the style has no single-pair evaluator.
  PairTerm single(int ti, int tj, double rsq) const;

  /// Overwrites `state.f` and returns energy and virial. The default loop
  /// evaluates eval() per listed pair.
  virtual ForceResult compute(SystemState& state, const NeighborList& list) const;

  /// Full-precision parameter blob for restart files.
  virtual void write_params(ByteWriter& out) const = 0;
  virtual void read_params(ByteReader& in) = 0;

 protected:
  bool shift_ = false;

 private:
  std::string name_;
};

/// Symmetric per-type-pair parameter storage, 1-based types.
template <class Params>
class CoeffTable {
 public:
  void resize(int ntypes) {
    if (ntypes == ntypes_) return;
    std::vector<std::optional<Params>> grown(static_cast<std::size_t>(ntypes) * ntypes);
    std::vector<char> grown_explicit(grown.size(), 0);
    for (int i = 1; i <= std::min(ntypes, ntypes_); ++i) {
      for (int j = i; j <= std::min(ntypes, ntypes_); ++j) {
        grown[index(i, j, ntypes)] = values_[index(i, j, ntypes_)];
        grown_explicit[index(i, j, ntypes)] = explicit_[index(i, j, ntypes_)];
      }
    }
    values_ = std::move(grown);
    explicit_ = std::move(grown_explicit);
    ntypes_ = ntypes;
  }
  int ntypes() const { return ntypes_; }
  bool is_set(int i, int j) const { return values_[index(i, j, ntypes_)].has_value(); }
  bool is_explicit(int i, int j) const { return explicit_[index(i, j, ntypes_)] != 0; }
  const Params& at(int i, int j) const { return *values_[index(i, j, ntypes_)]; }
  void set(int i, int j, Params p, bool is_explicit_value = true) {
    values_[index(i, j, ntypes_)] = std::move(p);
    explicit_[index(i, j, ntypes_)] = is_explicit_value ? 1 : 0;
  }
  void clear_implicit() {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!explicit_[k]) values_[k].reset();
    }
  }

 private:
  static std::size_t index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1);
  }
  int ntypes_ = 0;
  std::vector<std::optional<Params>> values_;
  std::vector<char> explicit_;
};

struct StyleInfo {
  std::string name;
  std::function<std::unique_ptr<PairStyle>()> factory;
  bool supports_single = true;
  /// Logical source-file name, e.g. `pair/lj_cut`. Used to map code diffs
  /// to styles.
  std::string source_unit;
  std::string summary;
};

class StyleRegistry {
 public:
  /// Throws E-DUPLICATE-STYLE.
  void register_style(StyleInfo info);
  const StyleInfo* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  /// Throws E-UNKNOWN-STYLE.
  std::unique_ptr<PairStyle> create(std::string_view name) const;
  /// Sorted by name.
  std::vector<const StyleInfo*> list() const;
  std::optional<std::string> style_for_unit(std::string_view unit) const;

 private:
  std::map<std::string, StyleInfo, std::less<>> styles_;
};

/// lj/cut, lj/cut/unrolled, morse, table.
const StyleRegistry& builtin_styles();

}  // namespace mdlite

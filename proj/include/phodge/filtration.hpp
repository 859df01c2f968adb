#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phodge/isocrystal.hpp"

namespace phodge {

struct FilStep {
  Rat jump;
  PMat basis;
};

/// Descending filtration with rational jump indices: steps are nested
/// subspaces with strictly decreasing jumps and strictly increasing
/// dimensions.  The last step is the support (the whole space for an
/// ambient filtration, the subspace itself for an induced one).
class FilteredSpace {
 public:
  FilteredSpace(int prime, int ambient_dim, std::vector<FilStep> steps);
  static FilteredSpace trivial(int prime, int dim, const Rat& jump = Rat(0));

  int prime() const { return prime_; }
  int ambient_dim() const { return ambient_dim_; }
  int rank() const;  // dimension of the support
  const std::vector<FilStep>& steps() const { return steps_; }
  const PMat& support() const { return steps_.back().basis; }
  bool full_support() const { return rank() == ambient_dim_; }

  /// F^x = largest step whose jump is >= x (zero space if none).
  PMat space_at_least(const Rat& x) const;
  /// F^{>x}.
  PMat space_above(const Rat& x) const;

  /// (jump, graded dimension) per step, graded dims positive.
  std::vector<std::pair<Rat, int>> graded_dims() const;

  std::string to_string() const;

 private:
  int prime_;
  int ambient_dim_;
  std::vector<FilStep> steps_;
};

/// Cocharacter data: integer weights attached to the columns of an
/// invertible frame, stored sorted non-increasing with the frame permuted
/// alongside.
class OneParamSubgroup {
 public:
  OneParamSubgroup(std::vector<Int> weights, PMat frame);
  static OneParamSubgroup diagonal(int prime, std::vector<Int> weights,
                                   Int rel_prec = kDefaultRelPrec);

  int prime() const { return frame_.prime(); }
  int dim() const { return frame_.rows(); }
  const std::vector<Int>& weights() const { return weights_; }
  const PMat& frame() const { return frame_; }
  Rat average_weight() const;

 private:
  std::vector<Int> weights_;
  PMat frame_;
};

struct SemistabilityVerdict {
  bool semistable = true;
  bool enumeration_complete = true;
  std::optional<PMat> witness;      // destabilizing subobject basis
  Rat witness_slope;                // its induced slope
  Rat ambient_slope;
};

std::pair<Rat, Rat> degree_and_slope(const FilteredSpace& F);

/// Steps F^x intersected with W, repeated subspaces collapsed onto their
/// deepest jump; support becomes W.
FilteredSpace induced_filtration(const FilteredSpace& F, const PMat& W);

FilteredSpace dual_filtration(const FilteredSpace& F);
FilteredSpace tensor_filtration(const FilteredSpace& F, const FilteredSpace& G);
FilteredSpace derived_constructions(const FilteredSpace& F,
                                    const FilteredSpace* G,
                                    const std::string& kind);

/// <F1,F2> = sum_{x,y} x*y*dim gr_{F1}^x(gr_{F2}^y(V)); both filtrations
/// must have full support on the same space.
Rat filtration_pairing(const FilteredSpace& F1, const FilteredSpace& F2);

/// Jump at each distinct weight x, subspace spanned by the frame columns
/// of weight >= x.
FilteredSpace filtration_from_1ps(const OneParamSubgroup& lambda);

/// Limit of lambda(t).F as t -> 0 (or t -> infinity), computed by graded
/// leading-term reduction; the result is lambda-fixed.
FilteredSpace ps_limit(const OneParamSubgroup& lambda, const FilteredSpace& F,
                       bool to_zero = true);

struct SubobjectEnumeration {
  std::vector<PMat> subspaces;  // includes 0 and the whole space
  bool complete = true;
};

/// Phi-stable subspaces: sums of isoclinic parts, refined into eigenline
/// sums where the slope factor splits into distinct roots over Q_p, plus
/// validated user generators.
SubobjectEnumeration enumerate_subisocrystals(const Isocrystal& E,
                                              const std::vector<PMat>& generators = {});

SemistabilityVerdict is_semistable(const Isocrystal& E, const FilteredSpace& F,
                                   const std::vector<PMat>& generators = {});

struct HnStep {
  PMat basis;
  Rat slope;  // slope of the graded piece ending at this step
};

/// Harder-Narasimhan filtration: strictly decreasing graded slopes with
/// semistable graded pieces, built greedily from the subobject enumeration.
std::vector<HnStep> hn_filtration(const Isocrystal& E, const FilteredSpace& F,
                                  const std::vector<PMat>& generators = {});

/// Hilbert-Mumford invariant -<F, F_lambda>.
Rat hm_invariant(const FilteredSpace& F, const OneParamSubgroup& lambda);

/// Ultrametric flag distance as an exact power of p: value p^(-exponent),
/// nullopt exponent meaning distance 0.
struct FlagDistance {
  std::optional<Int> exponent;
  bool is_zero() const { return !exponent.has_value(); }
  std::string to_string() const;
  Rat value(int prime) const;
};

FlagDistance flag_distance(const FilteredSpace& F1, const FilteredSpace& F2);

/// Quotient of a filtered isocrystal by a stable subspace, in coordinates
/// of a chosen complement inside `big`.
struct QuotientPiece {
  Isocrystal E;
  FilteredSpace F;
};
QuotientPiece quotient_piece(const Isocrystal& E, const FilteredSpace& F,
                             const PMat& sub, const PMat& big);

/// The induced filtration on big/sub alone (no Frobenius).
FilteredSpace quotient_filtration(const FilteredSpace& F, const PMat& sub,
                                  const PMat& big);

}  // namespace phodge

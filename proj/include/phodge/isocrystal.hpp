#pragma once

#include <utility>
#include <vector>

#include "phodge/linalg.hpp"

namespace phodge {

/// Slope multiset of an isocrystal: strictly decreasing values with
/// positive multiplicities.
class NewtonVector {
 public:
  NewtonVector() = default;
  /// From an arbitrary multiset of slopes.
  static NewtonVector from_slopes(std::vector<Rat> slopes);
  static NewtonVector from_pairs(std::vector<std::pair<Rat, int>> pairs);

  const std::vector<std::pair<Rat, int>>& pairs() const { return pairs_; }
  std::vector<Rat> flat() const;  // non-increasing, length = total multiplicity
  int total_multiplicity() const;
  Rat sum() const;
  std::string to_string() const;

  bool operator==(const NewtonVector& o) const { return pairs_ == o.pairs_; }

 private:
  std::vector<std::pair<Rat, int>> pairs_;
};

/// Finite-dimensional space with an invertible Frobenius matrix
/// (sigma = identity, residue degree 1).
class Isocrystal {
 public:
  Isocrystal(int prime, PMat frobenius);

  int prime() const { return prime_; }
  int dim() const { return frobenius_.rows(); }
  int residue_degree() const { return 1; }
  const PMat& frobenius() const { return frobenius_; }

 private:
  int prime_;
  PMat frobenius_;
};

struct SlopePart {
  Rat slope;
  PMat basis;  // columns span the isoclinic summand
};

/// The simple object for lambda = r/s: s x s matrix with p^r in the
/// top-right corner and 1 on the subdiagonal.
Isocrystal simple_isocrystal(int prime, long r, long s,
                             Int rel_prec = kDefaultRelPrec);

/// Slopes from the lower convex hull of the coefficient valuations of
/// det(1 - Frobenius*t); non-increasing, summing to val(det Frobenius).
NewtonVector newton_polygon(const Isocrystal& E);

/// Slope-by-slope factorization of a polynomial via Newton-polygon vertex
/// splitting with Hensel lifting.  Each entry is (common valuation of the
/// factor's roots, monic factor); factors multiply back to f (monic
/// normalization) within tracked precision.
std::vector<std::pair<Rat, PadicPoly>> slope_factorization(const PadicPoly& f);

/// Direct-sum decomposition into isoclinic parts, ordered by decreasing
/// slope.  The part for slope lambda is ker f_lambda(Frobenius).
std::vector<SlopePart> slope_decomposition(const Isocrystal& E);

/// Partial-sum dominance nu' <= nu (equal totals and equal full sums).
bool newton_leq(const NewtonVector& lhs, const NewtonVector& rhs);

/// Integrality test: each distinct slope times its multiplicity is an
/// integer.
bool is_admissible_newton(const NewtonVector& nu);

/// Cardinality of the stratum index set Delta(nu) for a polarized Newton
/// vector of length 2g (entries pair to 1).
long siegel_stratum_dimension(const NewtonVector& nu, int g);

class FilteredSpace;
/// Descending filtration with F^beta spanned by the parts of slope
/// lambda <= -beta; jump set is the negated slope set.
FilteredSpace slope_filtration(const Isocrystal& E);

}  // namespace phodge

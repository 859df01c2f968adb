#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phodge/padic.hpp"

namespace phodge {

/// Dense matrix over one prime's p-adic scalars, row-major.
class PMat {
 public:
  PMat() : prime_(2), rows_(0), cols_(0) {}
  PMat(int prime, int rows, int cols);
  static PMat identity(int prime, int n, Int rel_prec = kDefaultRelPrec);
  static PMat from_rational_rows(int prime, const std::vector<std::vector<Rat>>& rows,
                                 Int rel_prec = kDefaultRelPrec);
  static PMat column(std::vector<PadicScalar> entries);

  int prime() const { return prime_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return cols_ == 0; }

  PadicScalar& at(int r, int c);
  const PadicScalar& at(int r, int c) const;

  PMat operator+(const PMat& o) const;
  PMat operator-(const PMat& o) const;
  PMat operator*(const PMat& o) const;
  PMat scaled(const PadicScalar& c) const;
  PMat transpose() const;
  PMat col_range(int begin, int end) const;
  PMat hcat(const PMat& o) const;
  std::vector<PadicScalar> col(int j) const;

  bool is_zero_at_precision() const;
  /// Smallest certified valuation bound over all entries.
  Int min_val_bound() const;

  PMat kron(const PMat& o) const;

  std::string to_string() const;

 private:
  int prime_;
  int rows_, cols_;
  std::vector<PadicScalar> a_;
};

PMat from_rat_matrix(int prime, const std::vector<std::vector<Rat>>& rows,
                     Int rel_prec = kDefaultRelPrec);

/// Rank within tracked precision (pivots on minimal-valuation entries).
int rank(const PMat& m);

/// Canonical reduced column basis for the column span: pivot rows carry a
/// single 1 with zeros elsewhere in that row; columns ordered by pivot row.
/// Two spans of exactly-known matrices are equal iff their canonical bases
/// agree at precision.
PMat canonical_image(const PMat& m);

/// Right kernel basis (canonicalized); expected_dim >= 0 enforces the
/// certified dimension and raises PrecisionExhausted on mismatch.
PMat kernel(const PMat& m, int expected_dim = -1);

bool contains_span(const PMat& big, const PMat& small);
bool same_span(const PMat& a, const PMat& b);
PMat intersect_spans(const PMat& a, const PMat& b);
PMat sum_spans(const PMat& a, const PMat& b);

/// Solve a * x = b for x (a must have full column rank at precision).
PMat solve_in_span(const PMat& a, const PMat& b);

PadicScalar det(const PMat& m);

/// Characteristic polynomial det(t*I - m) by the division-free Berkowitz
/// algorithm (monic, degree n).
PadicPoly charpoly(const PMat& m);

/// All k x k minors of an n x k matrix, in lexicographic row-subset order.
std::vector<PadicScalar> pluecker(const PMat& basis);

/// Column span basis of the limit of a polynomial family of subspaces.
/// Each column is a vector of polynomials in t; `extreme_high` extracts the
/// top-degree direction (t -> infinity in valuation terms), otherwise the
/// lowest-degree one (t -> 0).
PMat grassmann_limit(std::vector<std::vector<PadicPoly>> cols, bool extreme_high);

/// Stable key for dedup of spans (canonical image, digits truncated).
std::string span_key(const PMat& m, Int digits = 40);

}  // namespace phodge

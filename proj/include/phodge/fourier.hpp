#pragma once

#include <optional>
#include <vector>

#include "phodge/padic.hpp"

namespace phodge {

/// Point z of the open unit disc, val(z) >= 1: the character
/// kappa_z(x) = (1+z)^x converges for all x in Z_p.
class CharacterPoint {
 public:
  explicit CharacterPoint(PadicScalar z);
  const PadicScalar& z() const { return z_; }
  int prime() const { return z_.prime(); }

 private:
  PadicScalar z_;
};

/// Coefficient sequence c_n of a Mahler expansion f = sum c_n P_n(. Omega),
/// with a convergence certificate: either finite support (polynomial
/// function class) or a linear decay bound val(c_n) >= alpha + beta*n for
/// the unstored tail.
class MahlerSeries {
 public:
  MahlerSeries(int prime, std::vector<PadicScalar> coeffs, Rat omega_val,
               Int radius_exponent, bool finite);
  static MahlerSeries finite_series(int prime, std::vector<PadicScalar> coeffs,
                                    Rat omega_val = Rat(0));
  /// Mahler series of the character kappa_w: c_n = w^n, with tail decay
  /// val(c_n) >= n*val(w).
  static MahlerSeries character(const PadicScalar& w, int stored);

  int prime() const { return prime_; }
  const std::vector<PadicScalar>& coeffs() const { return coeffs_; }
  PadicScalar coeff(int n) const;
  const Rat& omega_val() const { return omega_; }
  Int radius_exponent() const { return radius_; }
  bool finite() const { return finite_; }
  /// Valuation lower bound for all c_n with n > stored range.
  std::optional<Int> tail_val_bound(int n) const;

 private:
  int prime_;
  std::vector<PadicScalar> coeffs_;
  Rat omega_;
  Int radius_;
  bool finite_;
  std::optional<std::pair<Rat, Rat>> decay_;  // val(c_n) >= alpha + beta*n

  friend MahlerSeries with_decay(MahlerSeries, Rat, Rat);
};

MahlerSeries with_decay(MahlerSeries s, Rat alpha, Rat beta);

/// (1+z)^x as the binomial series sum binom(x,n) z^n with a certified tail.
PadicScalar eval_character(const CharacterPoint& pt, const PadicScalar& x);

/// [a](z) = (1+z)^a - 1.
PadicScalar monoid_action(const PadicScalar& a, const PadicScalar& z);

/// Coefficientwise pairing {F, f} = sum a_n c_n.
PadicScalar amice_pairing(const PadicPoly& F, const MahlerSeries& f);
PadicScalar amice_pairing(const TruncatedSeries& F, const MahlerSeries& f);

/// Mahler coefficients of a polynomial function on Z_p by exact finite
/// differences (omega = 0 normalization).
MahlerSeries mahler_expand(const RatPoly& f, int prime,
                           Int rel_prec = kDefaultRelPrec);

/// Evaluate a finite Mahler series at x (test and CLI helper).
PadicScalar mahler_eval(const MahlerSeries& f, const PadicScalar& x);

struct EstimateRow {
  int l;
  Int n;
  Rat norm_valuation;  // of P_l(y*Omega) under ||.||_{0,n}
};

struct EstimateReport {
  int prime;
  Rat omega;
  std::vector<EstimateRow> rows;      // all l <= l_max, n <= n_max
  bool bound_holds = true;            // the l <= n comparison against max P_i(y)
  std::vector<std::pair<Int, Rat>> decay_fit;  // per n: LS slope of valuation in l
};

/// Norm table for the binomial polynomials under the Omega scaling; checks
/// the comparison bound exactly and fits the observed decay per n.
EstimateReport estimate_report(int prime, int l_max, Int n_max, const Rat& omega);

}  // namespace phodge

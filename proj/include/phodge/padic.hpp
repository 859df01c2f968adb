#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phodge/rat.hpp"

namespace phodge {

inline constexpr Int kDefaultRelPrec = 64;

/// Exact p-adic number at tracked absolute precision.
///
/// A nonzero value is stored as p^v * u where u is a unit known modulo
/// p^k (k = relative precision), so the value is known modulo p^(v+k).
/// Cancellation that wipes out every known digit yields an "inexact zero"
/// O(p^b): a value known only to lie in p^b Z_p.  Asking such a value for
/// its valuation or digits raises PrecisionExhausted; this is where
/// cancellation bugs become loud instead of silent.
class PadicScalar {
 public:
  enum class State { exact_zero, o_zero, regular };

  PadicScalar() : prime_(2), state_(State::exact_zero) {}

  static PadicScalar zero(int prime);
  static PadicScalar o_zero(int prime, Int abs_prec);
  static PadicScalar one(int prime, Int rel_prec = kDefaultRelPrec);
  static PadicScalar from_integer(int prime, const mpz_class& n,
                                  Int rel_prec = kDefaultRelPrec);
  static PadicScalar from_int(int prime, long n, Int rel_prec = kDefaultRelPrec);
  static PadicScalar from_rational(int prime, const Rat& q,
                                   Int rel_prec = kDefaultRelPrec);
  // p^val * unit with unit given modulo p^rel_prec (unit % p != 0).
  static PadicScalar from_unit(int prime, Int val, mpz_class unit, Int rel_prec);
  // Uniformizer power p^e.
  static PadicScalar p_power(int prime, Int e, Int rel_prec = kDefaultRelPrec);

  int prime() const { return prime_; }
  State state() const { return state_; }
  bool is_exact_zero() const { return state_ == State::exact_zero; }
  bool known_nonzero() const { return state_ == State::regular; }
  /// True when no digit is known (exact zero or O(p^b)).
  bool is_zero_at_precision() const { return state_ != State::regular; }

  /// Valuation of a value whose leading digit is known.
  Int valuation() const;
  std::optional<Int> val_if_known() const;
  /// Certified lower bound on the valuation (kValInfinity for exact 0).
  Int val_lower_bound() const;
  /// The value is known modulo p^abs_precision().
  Int abs_precision() const;
  Int rel_precision() const { return state_ == State::regular ? relprec_ : 0; }
  const mpz_class& unit() const;
  /// Base-p digits of the unit, least significant first.
  std::vector<int> unit_digits() const;

  PadicScalar operator-() const;
  PadicScalar operator+(const PadicScalar& o) const;
  PadicScalar operator-(const PadicScalar& o) const;
  PadicScalar operator*(const PadicScalar& o) const;
  PadicScalar operator/(const PadicScalar& o) const;
  PadicScalar inverse() const;
  PadicScalar pow(Int e) const;

  /// Multiply by p^e (exact precision shift).
  PadicScalar shifted(Int e) const;
  /// Forget digits above p^abs_prec.
  PadicScalar capped(Int abs_prec) const;

  /// a and b agree within the shared tracked precision.
  static bool agree(const PadicScalar& a, const PadicScalar& b);

  /// Canonical integer representative in [0, p^abs_precision) for a value
  /// of valuation >= 0; used for display and hashing.
  mpz_class integer_rep() const;

  std::string to_string() const;

 private:
  void canonicalize();
  static void require_same_prime(const PadicScalar& a, const PadicScalar& b);

  int prime_;
  State state_;
  Int val_ = 0;      // regular: valuation; o_zero: abs precision bound
  Int relprec_ = 0;  // regular only: number of known digits, >= 1
  mpz_class unit_;   // regular only: in [1, p^relprec), not divisible by p
};

PadicScalar arith(const PadicScalar& a, const PadicScalar& b, const std::string& kind);

/// log(x) for val(x-1) >= 1, with certified truncation error.
PadicScalar padic_log(const PadicScalar& x);
/// exp(x) for val(x) > 1/(p-1), with certified truncation error.
PadicScalar padic_exp(const PadicScalar& x);

/// Binomial polynomial P_n(y) = y(y-1)...(y-n+1)/n!, exact over Q.
RatPoly binomial_poly(int n);

/// Dense polynomial over one prime's p-adics, low degree first.
class PadicPoly {
 public:
  explicit PadicPoly(int prime) : prime_(prime) {}
  PadicPoly(int prime, std::vector<PadicScalar> coeffs);
  static PadicPoly from_rationals(int prime, const std::vector<Rat>& coeffs,
                                  Int rel_prec = kDefaultRelPrec);
  static PadicPoly constant(const PadicScalar& c);

  int prime() const { return prime_; }
  const std::vector<PadicScalar>& coeffs() const { return coeffs_; }
  PadicScalar coeff(int i) const;
  /// Degree counts coefficients that are not exact zeros; -1 for the zero
  /// polynomial.  O(p^b) coefficients are kept (their digits may matter).
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  PadicPoly operator+(const PadicPoly& o) const;
  PadicPoly operator-(const PadicPoly& o) const;
  PadicPoly operator*(const PadicPoly& o) const;
  PadicPoly scaled(const PadicScalar& c) const;
  PadicPoly shifted_var(int k) const;  // multiply by t^k
  PadicScalar eval(const PadicScalar& x) const;

  /// Quotient and remainder; the divisor's leading coefficient must be a
  /// known unit times p-power (invertible at precision).
  static std::pair<PadicPoly, PadicPoly> divmod(const PadicPoly& num,
                                                const PadicPoly& den);

  /// f(t + a).
  PadicPoly taylor_shift(const PadicScalar& a) const;

  /// Minimal certified valuation over all coefficients (kValInfinity if
  /// every coefficient is an exact zero).
  Int min_coeff_val_bound() const;

  /// All coefficients are zero within tracked precision below `threshold`.
  bool vanishes_to(Int threshold) const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  int prime_;
  std::vector<PadicScalar> coeffs_;
};

/// Truncated power series: coefficients up to the stored order plus a
/// certified valuation bound for the omitted tail.
struct TruncatedSeries {
  PadicPoly poly;
  Int tail_bound = kValInfinity;

  explicit TruncatedSeries(PadicPoly p, Int tail = kValInfinity)
      : poly(std::move(p)), tail_bound(tail) {}
  int prime() const { return poly.prime(); }
};

/// Gauss-norm valuation of Lemma-6.5 type: min_i (val(c_i) + i*(n + omega))
/// over the coefficients of f recentered at a.  Returns nullopt for the
/// zero polynomial (norm 0, valuation +infinity).
std::optional<Rat> gauss_norm_val(const PadicPoly& f, const PadicScalar& a, Int n,
                                  const Rat& omega);
std::optional<Rat> gauss_norm_val(const RatPoly& f, int prime, const Rat& a, Int n,
                                  const Rat& omega);

}  // namespace phodge

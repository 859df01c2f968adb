#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "phodge/errors.hpp"

namespace phodge {

using Int = long long;
using Rat = mpq_class;

inline constexpr Int kValInfinity = 1LL << 60;

Rat rat_from_string(const std::string& s);

// "a/b", or just "a" when the denominator is 1.
std::string rat_to_string(const Rat& q);

// p-adic valuation of a nonzero rational; nullopt for 0.
std::optional<Int> rat_valuation(const Rat& q, int prime);

Int mpz_valuation(const mpz_class& n, int prime);  // n != 0

mpz_class mpz_power(const mpz_class& base, unsigned long e);

Int rat_floor(const Rat& q);
Int rat_ceil(const Rat& q);

// Dense polynomial over Q, low degree first.  Exact companion to PadicPoly
// for constructions that must stay rational (binomial polynomials, Gauss
// norms of exact data).
class RatPoly {
 public:
  RatPoly() = default;
  explicit RatPoly(std::vector<Rat> coeffs);
  static RatPoly constant(const Rat& c);
  static RatPoly variable();  // y

  const std::vector<Rat>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Rat coeff(int i) const;
  Rat eval(const Rat& x) const;

  RatPoly operator+(const RatPoly& o) const;
  RatPoly operator-(const RatPoly& o) const;
  RatPoly operator*(const RatPoly& o) const;
  RatPoly scaled(const Rat& c) const;

  // f(y + a)
  RatPoly taylor_shift(const Rat& a) const;

  std::string to_string(const std::string& var = "y") const;

 private:
  void trim();
  std::vector<Rat> coeffs_;
};

}  // namespace phodge

#include "phodge/rat.hpp"

#include <sstream>

namespace phodge {

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw ValidationError("empty rational literal");
  try {
    Rat q(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad rational literal '" + s + "'");
  }
}

std::string rat_to_string(const Rat& q) {
  Rat c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Int mpz_valuation(const mpz_class& n, int prime) {
  if (n == 0) throw ValidationError("valuation of zero integer");
  mpz_class rest;
  mp_bitcnt_t v = mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), mpz_class(prime).get_mpz_t());
  return static_cast<Int>(v);
}

std::optional<Int> rat_valuation(const Rat& q, int prime) {
  if (q == 0) return std::nullopt;
  return mpz_valuation(q.get_num(), prime) - mpz_valuation(q.get_den(), prime);
}

mpz_class mpz_power(const mpz_class& base, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Int rat_floor(const Rat& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return static_cast<Int>(f.get_si());
}

Int rat_ceil(const Rat& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return static_cast<Int>(c.get_si());
}

RatPoly::RatPoly(std::vector<Rat> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

RatPoly RatPoly::constant(const Rat& c) { return RatPoly({c}); }

RatPoly RatPoly::variable() { return RatPoly({Rat(0), Rat(1)}); }

void RatPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rat RatPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Rat(0);
  return coeffs_[i];
}

Rat RatPoly::eval(const Rat& x) const {
  Rat acc(0);
  for (int i = degree(); i >= 0; --i) acc = acc * x + coeffs_[i];
  return acc;
}

RatPoly RatPoly::operator+(const RatPoly& o) const {
  std::vector<Rat> out(std::max(coeffs_.size(), o.coeffs_.size()), Rat(0));
  for (size_t i = 0; i < out.size(); ++i) out[i] = coeff(static_cast<int>(i)) + o.coeff(static_cast<int>(i));
  return RatPoly(std::move(out));
}

RatPoly RatPoly::operator-(const RatPoly& o) const {
  std::vector<Rat> out(std::max(coeffs_.size(), o.coeffs_.size()), Rat(0));
  for (size_t i = 0; i < out.size(); ++i) out[i] = coeff(static_cast<int>(i)) - o.coeff(static_cast<int>(i));
  return RatPoly(std::move(out));
}

RatPoly RatPoly::operator*(const RatPoly& o) const {
  if (is_zero() || o.is_zero()) return RatPoly();
  std::vector<Rat> out(coeffs_.size() + o.coeffs_.size() - 1, Rat(0));
  for (size_t i = 0; i < coeffs_.size(); ++i)
    for (size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
  return RatPoly(std::move(out));
}

RatPoly RatPoly::scaled(const Rat& c) const {
  std::vector<Rat> out(coeffs_);
  for (auto& x : out) x *= c;
  return RatPoly(std::move(out));
}

RatPoly RatPoly::taylor_shift(const Rat& a) const {
  // Synthetic division by (y - (-a)) repeatedly: Horner-style shift.
  std::vector<Rat> out(coeffs_);
  const int n = static_cast<int>(out.size());
  for (int i = 0; i < n; ++i)
    for (int j = n - 2; j >= i; --j) out[j] += a * out[j + 1];
  return RatPoly(std::move(out));
}

std::string RatPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= degree(); ++i) {
    if (coeffs_[i] == 0) continue;
    if (!first) os << " + ";
    if (i == 0) {
      os << rat_to_string(coeffs_[i]);
    } else {
      if (coeffs_[i] == -1)
        os << "-";
      else if (coeffs_[i] != 1)
        os << rat_to_string(coeffs_[i]) << "*";
      os << var;
      if (i >= 2) os << "^" << i;
    }
    first = false;
  }
  return os.str();
}

}  // namespace phodge

#include "phodge/padic.hpp"

#include <algorithm>
#include <sstream>

namespace phodge {

namespace {

mpz_class p_to(int prime, Int k) {
  if (k < 0) throw ValidationError("negative power in modulus");
  return mpz_power(mpz_class(prime), static_cast<unsigned long>(k));
}

}  // namespace

PadicScalar PadicScalar::zero(int prime) {
  PadicScalar x;
  x.prime_ = prime;
  x.state_ = State::exact_zero;
  return x;
}

PadicScalar PadicScalar::o_zero(int prime, Int abs_prec) {
  PadicScalar x;
  x.prime_ = prime;
  x.state_ = State::o_zero;
  x.val_ = abs_prec;
  return x;
}

PadicScalar PadicScalar::from_unit(int prime, Int val, mpz_class unit, Int rel_prec) {
  if (rel_prec < 1) throw ValidationError("relative precision must be >= 1");
  PadicScalar x;
  x.prime_ = prime;
  x.state_ = State::regular;
  x.val_ = val;
  x.relprec_ = rel_prec;
  mpz_class m = p_to(prime, rel_prec);
  mpz_mod(x.unit_.get_mpz_t(), unit.get_mpz_t(), m.get_mpz_t());
  if (x.unit_ == 0 || x.unit_ % prime == 0)
    throw ValidationError("unit part divisible by p");
  return x;
}

PadicScalar PadicScalar::from_integer(int prime, const mpz_class& n, Int rel_prec) {
  if (n == 0) return zero(prime);
  mpz_class rest;
  Int v = static_cast<Int>(
      mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), mpz_class(prime).get_mpz_t()));
  return from_unit(prime, v, rest, rel_prec);
}

PadicScalar PadicScalar::from_int(int prime, long n, Int rel_prec) {
  return from_integer(prime, mpz_class(n), rel_prec);
}

PadicScalar PadicScalar::from_rational(int prime, const Rat& q, Int rel_prec) {
  if (q == 0) return zero(prime);
  mpz_class num_rest, den_rest;
  Int vn = static_cast<Int>(mpz_remove(num_rest.get_mpz_t(), q.get_num().get_mpz_t(),
                                       mpz_class(prime).get_mpz_t()));
  Int vd = static_cast<Int>(mpz_remove(den_rest.get_mpz_t(), q.get_den().get_mpz_t(),
                                       mpz_class(prime).get_mpz_t()));
  mpz_class m = p_to(prime, rel_prec);
  mpz_class den_inv;
  if (mpz_invert(den_inv.get_mpz_t(), den_rest.get_mpz_t(), m.get_mpz_t()) == 0)
    throw ValidationError("denominator not invertible mod p^k");
  return from_unit(prime, vn - vd, num_rest * den_inv, rel_prec);
}

PadicScalar PadicScalar::one(int prime, Int rel_prec) {
  return from_unit(prime, 0, mpz_class(1), rel_prec);
}

PadicScalar PadicScalar::p_power(int prime, Int e, Int rel_prec) {
  return from_unit(prime, e, mpz_class(1), rel_prec);
}

Int PadicScalar::valuation() const {
  if (state_ == State::regular) return val_;
  if (state_ == State::exact_zero) return kValInfinity;
  throw PrecisionExhausted("valuation of O(p^" + std::to_string(val_) +
                           ") is indeterminate");
}

std::optional<Int> PadicScalar::val_if_known() const {
  if (state_ == State::regular) return val_;
  if (state_ == State::exact_zero) return kValInfinity;
  return std::nullopt;
}

Int PadicScalar::val_lower_bound() const {
  switch (state_) {
    case State::exact_zero: return kValInfinity;
    case State::o_zero: return val_;
    default: return val_;
  }
}

Int PadicScalar::abs_precision() const {
  switch (state_) {
    case State::exact_zero: return kValInfinity;
    case State::o_zero: return val_;
    default: return val_ + relprec_;
  }
}

const mpz_class& PadicScalar::unit() const {
  if (state_ != State::regular)
    throw PrecisionExhausted("no known digits to read");
  return unit_;
}

std::vector<int> PadicScalar::unit_digits() const {
  const mpz_class& u = unit();
  std::vector<int> digits;
  digits.reserve(static_cast<size_t>(relprec_));
  mpz_class rest = u;
  for (Int i = 0; i < relprec_; ++i) {
    mpz_class d = rest % prime_;
    digits.push_back(static_cast<int>(d.get_si()));
    rest /= prime_;
  }
  return digits;
}

void PadicScalar::require_same_prime(const PadicScalar& a, const PadicScalar& b) {
  if (a.prime_ != b.prime_)
    throw ValidationError("mixed primes " + std::to_string(a.prime_) + " and " +
                          std::to_string(b.prime_));
}

PadicScalar PadicScalar::operator-() const {
  if (state_ != State::regular) return *this;
  mpz_class m = p_to(prime_, relprec_);
  return from_unit(prime_, val_, m - unit_, relprec_);
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
  require_same_prime(*this, o);
  if (state_ == State::exact_zero) return o;
  if (o.state_ == State::exact_zero) return *this;
  const Int cap = std::min(abs_precision(), o.abs_precision());
  if (state_ == State::o_zero && o.state_ == State::o_zero)
    return o_zero(prime_, cap);
  if (state_ == State::o_zero || o.state_ == State::o_zero) {
    const PadicScalar& reg = (state_ == State::regular) ? *this : o;
    if (reg.val_ >= cap) return o_zero(prime_, cap);
    // Digits of the regular summand survive below the O() bound.
    return from_unit(prime_, reg.val_, reg.unit_, cap - reg.val_);
  }
  const Int v = std::min(val_, o.val_);
  const Int k = cap - v;  // digits of the sum that are determined
  if (k <= 0) return o_zero(prime_, cap);
  mpz_class m = p_to(prime_, k);
  mpz_class s = unit_ * p_to(prime_, val_ - v) + o.unit_ * p_to(prime_, o.val_ - v);
  mpz_mod(s.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
  if (s == 0) return o_zero(prime_, cap);
  mpz_class rest;
  Int dv = static_cast<Int>(
      mpz_remove(rest.get_mpz_t(), s.get_mpz_t(), mpz_class(prime_).get_mpz_t()));
  if (v + dv >= cap) return o_zero(prime_, cap);
  return from_unit(prime_, v + dv, rest, cap - v - dv);
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const { return *this + (-o); }

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
  require_same_prime(*this, o);
  if (state_ == State::exact_zero || o.state_ == State::exact_zero)
    return zero(prime_);
  if (state_ == State::o_zero && o.state_ == State::o_zero)
    return o_zero(prime_, val_ + o.val_);
  if (state_ == State::o_zero || o.state_ == State::o_zero) {
    const PadicScalar& oz = (state_ == State::o_zero) ? *this : o;
    const PadicScalar& reg = (state_ == State::o_zero) ? o : *this;
    return o_zero(prime_, oz.val_ + reg.val_);
  }
  const Int k = std::min(relprec_, o.relprec_);
  mpz_class m = p_to(prime_, k);
  mpz_class u = unit_ * o.unit_;
  mpz_mod(u.get_mpz_t(), u.get_mpz_t(), m.get_mpz_t());
  return from_unit(prime_, val_ + o.val_, u, k);
}

PadicScalar PadicScalar::inverse() const {
  if (state_ == State::exact_zero) throw DivisionByZero("inverse of exact zero");
  if (state_ == State::o_zero)
    throw PrecisionExhausted("inverse of value with no known digits");
  mpz_class m = p_to(prime_, relprec_);
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), unit_.get_mpz_t(), m.get_mpz_t());
  return from_unit(prime_, -val_, inv, relprec_);
}

PadicScalar PadicScalar::operator/(const PadicScalar& o) const {
  require_same_prime(*this, o);
  if (o.state_ == State::exact_zero) throw DivisionByZero("division by exact zero");
  if (o.state_ == State::o_zero)
    throw PrecisionExhausted("division by value with no known digits");
  if (state_ == State::exact_zero) return zero(prime_);
  if (state_ == State::o_zero) return o_zero(prime_, val_ - o.val_);
  return *this * o.inverse();
}

PadicScalar PadicScalar::pow(Int e) const {
  if (e == 0) return one(prime_, state_ == State::regular ? relprec_ : kDefaultRelPrec);
  PadicScalar base = e > 0 ? *this : inverse();
  Int n = e > 0 ? e : -e;
  PadicScalar acc = base;
  --n;
  while (n > 0) {
    acc = acc * base;
    --n;
  }
  return acc;
}

PadicScalar PadicScalar::shifted(Int e) const {
  PadicScalar x = *this;
  if (x.state_ == State::exact_zero) return x;
  x.val_ += e;
  return x;
}

PadicScalar PadicScalar::capped(Int abs_prec) const {
  if (abs_precision() <= abs_prec) return *this;
  if (state_ == State::exact_zero) return o_zero(prime_, abs_prec);
  if (state_ == State::o_zero) return o_zero(prime_, abs_prec);
  if (val_ >= abs_prec) return o_zero(prime_, abs_prec);
  mpz_class m = p_to(prime_, abs_prec - val_);
  mpz_class u;
  mpz_mod(u.get_mpz_t(), unit_.get_mpz_t(), m.get_mpz_t());
  return from_unit(prime_, val_, u, abs_prec - val_);
}

bool PadicScalar::agree(const PadicScalar& a, const PadicScalar& b) {
  return (a - b).is_zero_at_precision();
}

mpz_class PadicScalar::integer_rep() const {
  if (state_ != State::regular) return mpz_class(0);
  if (val_ < 0) throw ValidationError("integer_rep of negative-valuation value");
  return unit_ * p_to(prime_, val_);
}

std::string PadicScalar::to_string() const {
  std::ostringstream os;
  switch (state_) {
    case State::exact_zero:
      os << "0";
      break;
    case State::o_zero:
      os << "O(" << prime_ << "^" << val_ << ")";
      break;
    case State::regular: {
      // Balanced representative: small negative values read as such.
      mpz_class m = p_to(prime_, relprec_);
      mpz_class rep = (unit_ * 2 > m) ? unit_ - m : unit_;
      os << rep.get_str() << "*" << prime_ << "^" << val_ << " + O(" << prime_
         << "^" << (val_ + relprec_) << ")";
      break;
    }
  }
  return os.str();
}

PadicScalar arith(const PadicScalar& a, const PadicScalar& b, const std::string& kind) {
  if (kind == "add") return a + b;
  if (kind == "sub") return a - b;
  if (kind == "mul") return a * b;
  if (kind == "div") return a / b;
  throw ValidationError("unknown arith kind '" + kind + "'");
}

PadicScalar padic_log(const PadicScalar& x) {
  const int p = x.prime();
  PadicScalar u = x - PadicScalar::one(p, kDefaultRelPrec);
  if (u.is_exact_zero()) return PadicScalar::zero(p);
  if (u.val_lower_bound() < 1)
    throw OutOfDomain("log requires val(x-1) >= 1");
  if (!u.known_nonzero()) return PadicScalar::o_zero(p, u.val_lower_bound());
  const Int v = u.valuation();
  const Int target = u.abs_precision();
  // Terms (-1)^(n+1) u^n / n; val = n*v - val_p(n).  The bound
  // n*v - floor(log_p n) is nondecreasing for v >= 1, so the first omitted
  // term certifies the tail.
  PadicScalar sum = PadicScalar::zero(p);
  PadicScalar power = u;
  Int n = 1;
  while (true) {
    Int flog = 0;
    Int q = n;
    while (q >= p) {
      q /= p;
      ++flog;
    }
    if (n * v - flog >= target && n > 1) break;
    PadicScalar term = power / PadicScalar::from_int(p, n);
    sum = (n % 2 == 1) ? sum + term : sum - term;
    ++n;
    if (n > 4 * target + 16) break;  // unreachable on the domain; guard anyway
    power = power * u;
  }
  Int flog = 0;
  Int q = n;
  while (q >= p) {
    q /= p;
    ++flog;
  }
  return sum.capped(std::min(target, n * v - flog));
}

PadicScalar padic_exp(const PadicScalar& x) {
  const int p = x.prime();
  if (x.is_exact_zero()) return PadicScalar::one(p, kDefaultRelPrec);
  const Int vmin = x.val_lower_bound();
  const bool in_domain = (p == 2) ? (vmin >= 2) : (vmin >= 1);
  if (!in_domain)
    throw OutOfDomain("exp requires val(x) > 1/(p-1)");
  if (!x.known_nonzero()) {
    // exp(O(p^b)) = 1 + O(p^b) on the domain.
    return PadicScalar::one(p, kDefaultRelPrec).capped(x.val_lower_bound());
  }
  const Int v = x.valuation();
  const Int target = x.abs_precision();
  // Terms x^n/n!; val = n*v - val_p(n!) >= n*v - (n-1)/(p-1), an increasing
  // lower bound on the domain, so it certifies the tail at the first
  // omitted index.
  PadicScalar sum = PadicScalar::one(p, static_cast<Int>(target));
  PadicScalar term = PadicScalar::one(p, static_cast<Int>(target));
  Int n = 1;
  Int tail = 0;
  while (true) {
    tail = n * v - (n - 1) / (p - 1);
    if (tail >= target) break;
    term = term * x / PadicScalar::from_int(p, n);
    sum = sum + term;
    ++n;
    if (n > 4 * target + 16) break;
  }
  return sum.capped(std::min(target, tail));
}

RatPoly binomial_poly(int n) {
  if (n < 0) throw ValidationError("binomial_poly needs n >= 0");
  RatPoly poly = RatPoly::constant(Rat(1));
  for (int k = 1; k <= n; ++k) {
    // P_k = P_{k-1} * (y - k + 1) / k
    poly = poly * RatPoly({Rat(1 - k), Rat(1)});
    poly = poly.scaled(Rat(1, k));
  }
  return poly;
}

PadicPoly::PadicPoly(int prime, std::vector<PadicScalar> coeffs)
    : prime_(prime), coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_)
    if (c.prime() != prime_) throw ValidationError("mixed primes in polynomial");
  trim();
}

PadicPoly PadicPoly::from_rationals(int prime, const std::vector<Rat>& coeffs,
                                    Int rel_prec) {
  std::vector<PadicScalar> out;
  out.reserve(coeffs.size());
  for (const auto& q : coeffs) out.push_back(PadicScalar::from_rational(prime, q, rel_prec));
  return PadicPoly(prime, std::move(out));
}

PadicPoly PadicPoly::constant(const PadicScalar& c) {
  return PadicPoly(c.prime(), {c});
}

void PadicPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_exact_zero()) coeffs_.pop_back();
}

PadicScalar PadicPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return PadicScalar::zero(prime_);
  return coeffs_[i];
}

PadicPoly PadicPoly::operator+(const PadicPoly& o) const {
  std::vector<PadicScalar> out;
  const int n = std::max(degree(), o.degree());
  for (int i = 0; i <= n; ++i) out.push_back(coeff(i) + o.coeff(i));
  return PadicPoly(prime_, std::move(out));
}

PadicPoly PadicPoly::operator-(const PadicPoly& o) const {
  std::vector<PadicScalar> out;
  const int n = std::max(degree(), o.degree());
  for (int i = 0; i <= n; ++i) out.push_back(coeff(i) - o.coeff(i));
  return PadicPoly(prime_, std::move(out));
}

PadicPoly PadicPoly::operator*(const PadicPoly& o) const {
  if (is_zero() || o.is_zero()) return PadicPoly(prime_);
  std::vector<PadicScalar> out(coeffs_.size() + o.coeffs_.size() - 1,
                               PadicScalar::zero(prime_));
  for (size_t i = 0; i < coeffs_.size(); ++i)
    for (size_t j = 0; j < o.coeffs_.size(); ++j)
      out[i + j] = out[i + j] + coeffs_[i] * o.coeffs_[j];
  return PadicPoly(prime_, std::move(out));
}

PadicPoly PadicPoly::scaled(const PadicScalar& c) const {
  std::vector<PadicScalar> out(coeffs_);
  for (auto& x : out) x = x * c;
  return PadicPoly(prime_, std::move(out));
}

PadicPoly PadicPoly::shifted_var(int k) const {
  if (is_zero()) return *this;
  std::vector<PadicScalar> out(coeffs_.size() + static_cast<size_t>(k),
                               PadicScalar::zero(prime_));
  for (size_t i = 0; i < coeffs_.size(); ++i) out[i + k] = coeffs_[i];
  return PadicPoly(prime_, std::move(out));
}

PadicScalar PadicPoly::eval(const PadicScalar& x) const {
  PadicScalar acc = PadicScalar::zero(prime_);
  for (int i = degree(); i >= 0; --i) acc = acc * x + coeffs_[i];
  return acc;
}

std::pair<PadicPoly, PadicPoly> PadicPoly::divmod(const PadicPoly& num,
                                                  const PadicPoly& den) {
  if (den.is_zero()) throw DivisionByZero("polynomial division by zero");
  const int p = num.prime();
  const PadicScalar lead = den.coeffs_.back();
  if (!lead.known_nonzero())
    throw PrecisionExhausted("divisor leading coefficient has no known digits");
  std::vector<PadicScalar> rem(num.coeffs_);
  std::vector<PadicScalar> quot;
  const int dn = static_cast<int>(rem.size()) - 1;
  const int dd = den.degree();
  if (dn < dd) return {PadicPoly(p), num};
  quot.assign(static_cast<size_t>(dn - dd + 1), PadicScalar::zero(p));
  for (int i = dn; i >= dd; --i) {
    PadicScalar c = rem[i];
    if (c.is_exact_zero()) {
      quot[i - dd] = PadicScalar::zero(p);
      continue;
    }
    // c / lead is defined even for O(p^b) coefficients; the fuzz it spreads
    // into lower terms keeps the tracked precision honest.
    PadicScalar q = c / lead;
    quot[i - dd] = q;
    for (int j = 0; j < dd; ++j) rem[i - dd + j] = rem[i - dd + j] - q * den.coeffs_[j];
    rem[i] = PadicScalar::zero(p);  // cancelled by construction
  }
  rem.resize(static_cast<size_t>(std::max(dd, 0)), PadicScalar::zero(p));
  return {PadicPoly(p, std::move(quot)), PadicPoly(p, std::move(rem))};
}

PadicPoly PadicPoly::taylor_shift(const PadicScalar& a) const {
  std::vector<PadicScalar> out(coeffs_);
  const int n = static_cast<int>(out.size());
  for (int i = 0; i < n; ++i)
    for (int j = n - 2; j >= i; --j) out[j] = out[j] + a * out[j + 1];
  return PadicPoly(prime_, std::move(out));
}

Int PadicPoly::min_coeff_val_bound() const {
  Int m = kValInfinity;
  for (const auto& c : coeffs_) m = std::min(m, c.val_lower_bound());
  return m;
}

bool PadicPoly::vanishes_to(Int threshold) const {
  for (const auto& c : coeffs_)
    if (c.known_nonzero() && c.valuation() < threshold) return false;
  return true;
}

std::string PadicPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= degree(); ++i) {
    if (coeffs_[i].is_exact_zero()) continue;
    if (!first) os << " + ";
    os << "(" << coeffs_[i].to_string() << ")";
    if (i >= 1) os << "*" << var;
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

std::optional<Rat> gauss_norm_val(const PadicPoly& f, const PadicScalar& a, Int n,
                                  const Rat& omega) {
  PadicPoly g = f.taylor_shift(a);
  bool any = false;
  Rat best;
  for (int i = 0; i <= g.degree(); ++i) {
    const PadicScalar& c = g.coeffs()[i];
    if (!c.known_nonzero()) {
      if (!c.is_exact_zero())
        throw PrecisionExhausted("Gauss norm needs certified coefficient valuations");
      continue;
    }
    Rat w = Rat(static_cast<long>(c.valuation())) + Rat(i) * (Rat(static_cast<long>(n)) + omega);
    if (!any || w < best) {
      best = w;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return best;
}

std::optional<Rat> gauss_norm_val(const RatPoly& f, int prime, const Rat& a, Int n,
                                  const Rat& omega) {
  RatPoly g = f.taylor_shift(a);
  bool any = false;
  Rat best;
  for (int i = 0; i <= g.degree(); ++i) {
    auto v = rat_valuation(g.coeff(i), prime);
    if (!v) continue;
    Rat w = Rat(static_cast<long>(*v)) + Rat(i) * (Rat(static_cast<long>(n)) + omega);
    if (!any || w < best) {
      best = w;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return best;
}

}  // namespace phodge

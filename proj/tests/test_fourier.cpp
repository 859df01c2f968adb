#include <random>

#include "doctest.h"
#include "phodge/fourier.hpp"

using namespace phodge;

namespace {

// Compose a polynomial with another polynomial (Horner).
PadicPoly compose(const PadicPoly& F, const PadicPoly& inner) {
  const int p = F.prime();
  PadicPoly acc(p);
  for (int i = F.degree(); i >= 0; --i) {
    acc = acc * inner + PadicPoly::constant(F.coeff(i));
  }
  return acc;
}

// Mahler coefficients of an arbitrary evaluable function by forward
// differences over its integer values (test-side oracle).
std::vector<PadicScalar> mahler_from_values(int p, int count,
                                            const std::function<PadicScalar(long)>& f) {
  std::vector<PadicScalar> values;
  for (long k = 0; k < count; ++k) values.push_back(f(k));
  std::vector<PadicScalar> out;
  for (int n = 0; n < count; ++n) {
    out.push_back(values[0]);
    for (size_t k = 0; k + 1 < values.size(); ++k) values[k] = values[k + 1] - values[k];
    values.pop_back();
  }
  return out;
}

PadicScalar int_pow(const PadicScalar& base, long e) {
  PadicScalar acc = PadicScalar::one(base.prime());
  for (long i = 0; i < e; ++i) acc = acc * base;
  return acc;
}

}  // namespace

TEST_CASE("character evaluation") {
  const int p = 5;
  CharacterPoint pt(PadicScalar::from_int(p, 5));
  CHECK(PadicScalar::agree(eval_character(pt, PadicScalar::zero(p)),
                           PadicScalar::one(p)));
  CHECK(PadicScalar::agree(eval_character(pt, PadicScalar::one(p)),
                           PadicScalar::from_int(p, 6)));
  // kappa_z(-1) against the geometric series 1/(1+z).
  auto inv = PadicScalar::one(p) / PadicScalar::from_int(p, 6);
  CHECK(PadicScalar::agree(eval_character(pt, -PadicScalar::one(p)), inv));

  CHECK_THROWS_AS(CharacterPoint(PadicScalar::from_int(p, 2)), OutOfDisc);
  CHECK_THROWS_AS(eval_character(pt, PadicScalar::from_rational(p, Rat(1, 5))),
                  OutOfDomain);
}

TEST_CASE("character homomorphism") {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<long> small(-30, 30);
  for (int p : {2, 3, 5}) {
    CharacterPoint pt(PadicScalar::from_int(p, 2 * p));
    for (int iter = 0; iter < 25; ++iter) {
      auto x = PadicScalar::from_int(p, small(rng));
      auto y = PadicScalar::from_int(p, small(rng));
      auto lhs = eval_character(pt, x + y);
      auto rhs = eval_character(pt, x) * eval_character(pt, y);
      CHECK(PadicScalar::agree(lhs, rhs));
    }
  }
}

TEST_CASE("monoid action") {
  const int p = 5;
  auto z = PadicScalar::from_int(p, 5);
  CHECK(PadicScalar::agree(monoid_action(PadicScalar::one(p), z), z));
  // [2](z) = z^2 + 2z.
  auto two = monoid_action(PadicScalar::from_int(p, 2), z);
  CHECK(PadicScalar::agree(two, PadicScalar::from_int(p, 35)));
  // kappa_{[3](z)}(2) = kappa_z(6).
  auto z3 = monoid_action(PadicScalar::from_int(p, 3), z);
  auto lhs = eval_character(CharacterPoint(z3), PadicScalar::from_int(p, 2));
  auto rhs = eval_character(CharacterPoint(z), PadicScalar::from_int(p, 6));
  CHECK(PadicScalar::agree(lhs, rhs));
}

TEST_CASE("monoid compatibility pointwise") {
  std::mt19937_64 rng(607);
  std::uniform_int_distribution<long> small(1, 12);
  for (int p : {2, 3}) {
    auto z = PadicScalar::from_int(p, p);
    for (int iter = 0; iter < 10; ++iter) {
      long a = small(rng), x = small(rng);
      auto az = monoid_action(PadicScalar::from_int(p, a), z);
      auto lhs = eval_character(CharacterPoint(az), PadicScalar::from_int(p, x));
      auto rhs = eval_character(CharacterPoint(z), PadicScalar::from_int(p, a * x));
      CHECK(PadicScalar::agree(lhs, rhs));
    }
  }
}

TEST_CASE("amice pairing identities") {
  const int p = 5;
  // {1, f} = f(0) = c_0.
  auto f = mahler_expand(RatPoly({Rat(3), Rat(1), Rat(2)}), p);
  auto one_poly = PadicPoly::from_rationals(p, {Rat(1)});
  CHECK(PadicScalar::agree(amice_pairing(one_poly, f), PadicScalar::from_int(p, 3)));

  // {F, kappa_w} = F(w).
  auto w = PadicScalar::from_int(p, 10);
  auto kw = MahlerSeries::character(w, 16);
  auto F = PadicPoly::from_rationals(p, {Rat(2), Rat(0), Rat(1), Rat(4)});
  CHECK(PadicScalar::agree(amice_pairing(F, kw), F.eval(w)));

  // {z^m, f} = c_m.
  for (int m = 0; m <= 2; ++m) {
    std::vector<Rat> mono(static_cast<size_t>(m) + 1, Rat(0));
    mono.back() = Rat(1);
    auto zm = PadicPoly::from_rationals(p, mono);
    CHECK(PadicScalar::agree(amice_pairing(zm, f), f.coeff(m)));
  }
}

TEST_CASE("pairing recentering and monoid identities") {
  const int p = 5;
  std::mt19937_64 rng(321);
  std::uniform_int_distribution<long> small(-4, 4);
  for (int iter = 0; iter < 10; ++iter) {
    // Random polynomial F and polynomial function f.
    std::vector<Rat> fc, gc;
    for (int i = 0; i < 4; ++i) fc.emplace_back(small(rng));
    for (int i = 0; i < 3; ++i) gc.emplace_back(small(rng));
    RatPoly fq(gc);
    auto F = PadicPoly::from_rationals(p, fc);
    auto f = mahler_expand(fq, p);
    auto z = PadicScalar::from_int(p, 5);

    // {F, kappa_z . f} = {F(z + .), f}: multiplying by the character
    // recenters along the disc group law z + X + zX, so the right side
    // substitutes X -> z + (1+z)X.  Left side via finite differences of the
    // product function.
    const int count = F.degree() + 1;
    auto coeffs = mahler_from_values(p, count, [&](long k) {
      return int_pow(PadicScalar::from_int(p, 6), k) *
             PadicScalar::from_rational(p, fq.eval(Rat(k)));
    });
    PadicScalar lhs = PadicScalar::zero(p);
    for (int n = 0; n < count; ++n) lhs = lhs + F.coeff(n) * coeffs[static_cast<size_t>(n)];
    auto shift = PadicPoly(p, {z, PadicScalar::one(p) + z});
    auto rhs = amice_pairing(compose(F, shift), f);
    CHECK(PadicScalar::agree(lhs, rhs));

    // {F, f(a.)} = {F o [a], f} for small positive integers a.
    for (long a : {1L, 2L, 3L}) {
      // f(a x) as an exact polynomial.
      std::vector<Rat> scaled(gc);
      Rat apow(1);
      for (size_t i = 0; i < scaled.size(); ++i) {
        scaled[i] *= apow;
        apow *= Rat(a);
      }
      auto lhs2 = amice_pairing(F, mahler_expand(RatPoly(scaled), p));
      // [a](z) = (1+z)^a - 1 as a polynomial.
      std::vector<Rat> az(static_cast<size_t>(a) + 1, Rat(0));
      mpz_class binom(1);
      for (long k = 0; k <= a; ++k) {
        az[static_cast<size_t>(k)] = Rat(binom);
        binom = binom * (a - k) / (k + 1);
      }
      az[0] -= 1;
      auto rhs2 = amice_pairing(compose(F, PadicPoly::from_rationals(p, az)), f);
      CHECK(PadicScalar::agree(lhs2, rhs2));
    }
  }
}

TEST_CASE("mahler expansion") {
  const int p = 5;
  auto fx = mahler_expand(RatPoly({Rat(0), Rat(1)}), p);
  REQUIRE(fx.coeffs().size() == 2);
  CHECK(fx.coeffs()[0].is_zero_at_precision());
  CHECK(PadicScalar::agree(fx.coeffs()[1], PadicScalar::one(p)));

  auto fx2 = mahler_expand(RatPoly({Rat(0), Rat(0), Rat(1)}), p);
  REQUIRE(fx2.coeffs().size() == 3);
  CHECK(fx2.coeffs()[0].is_zero_at_precision());
  CHECK(PadicScalar::agree(fx2.coeffs()[1], PadicScalar::one(p)));
  CHECK(PadicScalar::agree(fx2.coeffs()[2], PadicScalar::from_int(p, 2)));

  // Truncated character: f = sum_{n<=d} w^n P_n(x) has coefficients w^n.
  Rat w(10);
  RatPoly f;
  Rat wpow(1);
  for (int n = 0; n <= 4; ++n) {
    f = f + binomial_poly(n).scaled(wpow);
    wpow *= w;
  }
  auto series = mahler_expand(f, p);
  REQUIRE(series.coeffs().size() == 5);
  Rat expect(1);
  for (int n = 0; n <= 4; ++n) {
    CHECK(PadicScalar::agree(series.coeffs()[static_cast<size_t>(n)],
                             PadicScalar::from_rational(p, expect)));
    expect *= w;
  }
}

TEST_CASE("mahler round-trip on polynomials") {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<long> small(-6, 6);
  for (int p : {2, 3, 5}) {
    for (int deg = 0; deg <= 10; ++deg) {
      std::vector<Rat> cs;
      for (int i = 0; i <= deg; ++i) cs.emplace_back(small(rng));
      RatPoly f(cs);
      auto series = mahler_expand(f, p);
      for (long x = 0; x <= 12; ++x) {
        auto lhs = mahler_eval(series, PadicScalar::from_int(p, x));
        auto rhs = PadicScalar::from_rational(p, f.eval(Rat(x)));
        CHECK(PadicScalar::agree(lhs, rhs));
      }
    }
  }
}

TEST_CASE("pairing against truncated series") {
  const int p = 5;
  auto f = mahler_expand(RatPoly({Rat(3), Rat(1), Rat(2)}), p);
  // A truncated series whose omitted tail has valuation >= 30.
  TruncatedSeries F(PadicPoly::from_rationals(p, {Rat(1), Rat(5)}), 30);
  auto v = amice_pairing(F, f);
  // Finite part is c_0 + 5 c_1; the tail only caps the precision.
  auto exact = f.coeff(0) + PadicScalar::from_int(p, 5) * f.coeff(1);
  CHECK(PadicScalar::agree(v, exact));
  CHECK(v.abs_precision() <= 30);
  CHECK(v.abs_precision() >= 20);

  // A series paired against an uncertified tail is refused.
  MahlerSeries bare(p, {PadicScalar::one(p)}, Rat(0), 0, false);
  CHECK_THROWS_AS(amice_pairing(TruncatedSeries(
                      PadicPoly::from_rationals(p, {Rat(1), Rat(1), Rat(1)}), 10), bare),
                  Divergent);
}

TEST_CASE("estimate report") {
  auto rep = estimate_report(2, 6, 4, Rat(0));
  CHECK(rep.bound_holds);
  // p=2, l=1, n=1, omega=0: P_1 = y has a single coefficient.
  bool found11 = false, found41 = false;
  for (const auto& row : rep.rows) {
    if (row.l == 1 && row.n == 1) {
      CHECK(row.norm_valuation == Rat(1));
      found11 = true;
    }
    if (row.l == 4 && row.n == 1) {
      CHECK(row.norm_valuation == Rat(-1));
      found41 = true;
    }
  }
  CHECK(found11);
  CHECK(found41);

  // The comparison bound holds for every prime and omega tried.
  for (int p : {2, 3, 5}) {
    auto r = estimate_report(p, 12, 8, Rat(1, p - 1));
    CHECK(r.bound_holds);
    CHECK(!r.decay_fit.empty());
  }
}

TEST_CASE("decay envelope is non-increasing in the block index") {
  // Blockwise envelope (max over l in [L, 2L)) of the norm valuation of
  // P_l(y Omega) at omega = 1/(p-1) shrinks as L doubles; small-range
  // mirror of the acceptance check, values confirmed by the exact
  // coefficient-valuation oracle.
  for (int p : {2, 3}) {
    Rat omega(1, p - 1);
    std::vector<RatPoly> polys;
    polys.push_back(RatPoly::constant(Rat(1)));
    for (int l = 1; l < 64; ++l) {
      RatPoly next = polys.back() * RatPoly({Rat(1 - l), Rat(1)});
      polys.push_back(next.scaled(Rat(1, l)));
    }
    for (Int n = 1; n <= 2; ++n) {
      Rat prev_max;
      bool first = true;
      for (int L : {16, 32}) {
        Rat block_max;
        bool any = false;
        for (int l = L; l < 2 * L; ++l) {
          auto v = gauss_norm_val(polys[static_cast<size_t>(l)], p, Rat(0), n, omega);
          REQUIRE(v.has_value());
          if (!any || *v > block_max) {
            block_max = *v;
            any = true;
          }
        }
        if (!first) CHECK(block_max <= prev_max);
        prev_max = block_max;
        first = false;
      }
    }
  }
}

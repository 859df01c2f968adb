#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "phodge/filtration.hpp"
#include "phodge/isocrystal.hpp"

using namespace phodge;
using phodge::testing::random_isocrystal;
using phodge::testing::rational_matrix;

TEST_CASE("simple isocrystals") {
  auto E = simple_isocrystal(5, 1, 2);
  CHECK(E.dim() == 2);
  CHECK(PadicScalar::agree(E.frobenius().at(0, 1), PadicScalar::from_int(5, 5)));
  CHECK(PadicScalar::agree(E.frobenius().at(1, 0), PadicScalar::one(5)));
  CHECK(E.frobenius().at(0, 0).is_exact_zero());

  auto unit = simple_isocrystal(5, 0, 1);
  CHECK(unit.dim() == 1);
  CHECK(PadicScalar::agree(unit.frobenius().at(0, 0), PadicScalar::one(5)));

  auto E32 = simple_isocrystal(5, 3, 2);
  CHECK(E32.frobenius().at(0, 1).valuation() == 3);

  CHECK_THROWS_AS(simple_isocrystal(5, 2, 4), NotCoprime);
  CHECK_THROWS_AS(simple_isocrystal(5, 1, 0), NotCoprime);
}

TEST_CASE("newton polygon basics") {
  auto nu = newton_polygon(simple_isocrystal(5, 1, 2));
  CHECK(nu.to_string() == "1/2,1/2");

  Isocrystal id1(5, PMat::identity(5, 1));
  CHECK(newton_polygon(id1).to_string() == "0");

  auto diag = rational_matrix(5, {{25, 0, 0}, {0, 5, 0}, {0, 0, 1}});
  CHECK(newton_polygon(Isocrystal(5, diag)).to_string() == "2,1,0");
}

TEST_CASE("newton polygon matches eigenvalue valuations on random conjugates") {
  std::mt19937_64 rng(4242);
  for (int p : {2, 3, 5}) {
    for (int iter = 0; iter < 30; ++iter) {
      std::uniform_int_distribution<int> dim(2, 4);
      std::uniform_int_distribution<int> val(-2, 3);
      int n = dim(rng);
      std::vector<Int> vals;
      for (int i = 0; i < n; ++i) vals.push_back(val(rng));
      auto E = random_isocrystal(p, vals, rng);
      auto nu = newton_polygon(E).flat();
      std::sort(vals.begin(), vals.end(), std::greater<>());
      REQUIRE(nu.size() == vals.size());
      for (size_t i = 0; i < nu.size(); ++i)
        CHECK(nu[i] == Rat(static_cast<long>(vals[i])));
    }
  }
}

TEST_CASE("slopes sum to val(det) and direct sums merge") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 15; ++iter) {
    std::uniform_int_distribution<int> val(-2, 2);
    auto A = random_isocrystal(3, {val(rng), val(rng)}, rng);
    auto B = random_isocrystal(3, {val(rng)}, rng);
    PMat block(3, 3, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) block.at(i, j) = A.frobenius().at(i, j);
    block.at(2, 2) = B.frobenius().at(0, 0);
    Isocrystal sum(3, block);
    auto nu = newton_polygon(sum);
    CHECK(nu.sum() == Rat(static_cast<long>(det(sum.frobenius()).valuation())));
    std::vector<Rat> merged = newton_polygon(A).flat();
    for (const auto& s : newton_polygon(B).flat()) merged.push_back(s);
    CHECK(NewtonVector::from_slopes(merged) == nu);
  }
}

TEST_CASE("slope factorization") {
  // t^2 - p: a single segment of slope 1/2.
  auto f = PadicPoly::from_rationals(5, {Rat(-5), Rat(0), Rat(1)});
  auto fac = slope_factorization(f);
  REQUIRE(fac.size() == 1);
  CHECK(fac[0].first == Rat(1, 2));

  // t^2 - (1+p)t + p splits into root valuations 0 and 1.
  auto g = PadicPoly::from_rationals(5, {Rat(5), Rat(-6), Rat(1)});
  auto gfac = slope_factorization(g);
  REQUIRE(gfac.size() == 2);
  CHECK(gfac[0].first == Rat(1));
  CHECK(gfac[1].first == Rat(0));
  // Hensel-lift oracle: exact roots are p and 1.
  CHECK(PadicScalar::agree(gfac[0].second.coeff(0), PadicScalar::from_int(5, -5)));
  CHECK(PadicScalar::agree(gfac[1].second.coeff(0), PadicScalar::from_int(5, -1)));
  auto prod = gfac[0].second * gfac[1].second;
  CHECK((prod - g).vanishes_to(24));

  // t^2 - 1: equal slopes stay together.
  auto h = PadicPoly::from_rationals(5, {Rat(-1), Rat(0), Rat(1)});
  auto hfac = slope_factorization(h);
  REQUIRE(hfac.size() == 1);
  CHECK(hfac[0].first == Rat(0));
}

TEST_CASE("slope factorization conserves degree and constant valuation") {
  std::mt19937_64 rng(77);
  for (int p : {2, 3, 5}) {
    for (int iter = 0; iter < 20; ++iter) {
      std::uniform_int_distribution<int> val(-1, 2);
      std::uniform_int_distribution<int> unit(1, p - 1);
      // Product of linear factors with known root valuations.
      std::uniform_int_distribution<int> deg(2, 4);
      int n = deg(rng);
      auto f = PadicPoly::from_rationals(p, {Rat(1)});
      Int const_val = 0;
      for (int i = 0; i < n; ++i) {
        Int v = val(rng);
        const_val += v;
        Rat rv(mpz_power(mpz_class(p), static_cast<unsigned long>(std::abs(v))));
        Rat r = Rat(unit(rng));
        if (v >= 0) r *= rv; else r /= rv;
        r.canonicalize();
        f = f * PadicPoly::from_rationals(p, {-r, Rat(1)});
      }
      auto fac = slope_factorization(f);
      int total_deg = 0;
      Int total_val = 0;
      for (const auto& [s, g] : fac) {
        total_deg += g.degree();
        total_val += g.coeff(0).valuation();
      }
      CHECK(total_deg == n);
      CHECK(total_val == const_val);
    }
  }
}

TEST_CASE("slope decomposition") {
  auto diag = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto parts = slope_decomposition(diag);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].slope == Rat(1));
  CHECK(same_span(parts[0].basis, rational_matrix(5, {{0}, {1}})));
  CHECK(parts[1].slope == Rat(0));
  CHECK(same_span(parts[1].basis, rational_matrix(5, {{1}, {0}})));

  auto simple = simple_isocrystal(5, 1, 2);
  auto sparts = slope_decomposition(simple);
  REQUIRE(sparts.size() == 1);
  CHECK(sparts[0].slope == Rat(1, 2));
  CHECK(sparts[0].basis.cols() == 2);

  // block-diag(simple(1,2), [1])
  PMat block(5, 3, 3);
  block.at(0, 1) = PadicScalar::from_int(5, 5);
  block.at(1, 0) = PadicScalar::one(5);
  block.at(2, 2) = PadicScalar::one(5);
  auto bparts = slope_decomposition(Isocrystal(5, block));
  REQUIRE(bparts.size() == 2);
  CHECK(bparts[0].slope == Rat(1, 2));
  CHECK(bparts[0].basis.cols() == 2);
  CHECK(bparts[1].slope == Rat(0));
  CHECK(bparts[1].basis.cols() == 1);
}

TEST_CASE("slope parts are Frobenius-stable with constant induced slopes") {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 10; ++iter) {
    auto E = random_isocrystal(3, {2, 1, 0}, rng);
    for (const auto& part : slope_decomposition(E)) {
      CHECK(contains_span(part.basis, E.frobenius() * part.basis));
      PMat restricted = solve_in_span(part.basis, E.frobenius() * part.basis);
      auto nu = newton_polygon(Isocrystal(3, restricted));
      REQUIRE(nu.pairs().size() == 1);
      CHECK(nu.pairs()[0].first == part.slope);
    }
  }
}

TEST_CASE("slope filtration") {
  auto diag = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto F = slope_filtration(diag);
  REQUIRE(F.steps().size() == 2);
  CHECK(F.steps()[0].jump == Rat(0));
  CHECK(same_span(F.steps()[0].basis, rational_matrix(5, {{1}, {0}})));
  CHECK(F.steps()[1].jump == Rat(-1));
  CHECK(F.steps()[1].basis.cols() == 2);

  auto iso = Isocrystal(5, rational_matrix(5, {{5, 0}, {0, 5}}));
  auto Fi = slope_filtration(iso);
  REQUIRE(Fi.steps().size() == 1);
  CHECK(Fi.steps()[0].jump == Rat(-1));

  auto Fs = slope_filtration(simple_isocrystal(5, 1, 2));
  REQUIRE(Fs.steps().size() == 1);
  CHECK(Fs.steps()[0].jump == Rat(-1, 2));
}

TEST_CASE("newton partial order") {
  auto ord = NewtonVector::from_slopes({Rat(1), Rat(0)});
  auto ss = NewtonVector::from_slopes({Rat(1, 2), Rat(1, 2)});
  CHECK(newton_leq(ss, ord));
  CHECK(!newton_leq(ord, ss));
  CHECK(newton_leq(ord, ord));
  auto a = NewtonVector::from_slopes({Rat(1), Rat(1)});
  auto b = NewtonVector::from_slopes({Rat(2), Rat(0)});
  CHECK(newton_leq(a, b));
  CHECK(!newton_leq(b, a));
  CHECK_THROWS_AS(newton_leq(a, NewtonVector::from_slopes({Rat(1)})), DimensionMismatch);

  // Partial order laws on random triples with equal sums.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 3);
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<Rat> x{Rat(v(rng)), Rat(v(rng)), Rat(v(rng))};
    std::vector<Rat> y{x[1], x[2], x[0]};
    std::vector<Rat> z{x[2], x[0], x[1]};
    auto nx = NewtonVector::from_slopes(x);
    auto ny = NewtonVector::from_slopes(y);
    auto nz = NewtonVector::from_slopes(z);
    CHECK(newton_leq(nx, nx));
    if (newton_leq(nx, ny) && newton_leq(ny, nx)) CHECK(nx == ny);
    if (newton_leq(nx, ny) && newton_leq(ny, nz)) CHECK(newton_leq(nx, nz));
  }
}

TEST_CASE("admissibility") {
  CHECK(is_admissible_newton(NewtonVector::from_slopes({Rat(1, 2), Rat(1, 2)})));
  CHECK(!is_admissible_newton(NewtonVector::from_slopes({Rat(1, 2)})));
  CHECK(is_admissible_newton(NewtonVector::from_slopes({Rat(2, 3), Rat(2, 3), Rat(2, 3)})));
}

TEST_CASE("coprime simple objects have constant newton vectors") {
  for (int p : {2, 3, 5}) {
    for (long s = 1; s <= 5; ++s) {
      for (long r = -5; r <= 5; ++r) {
        if (std::gcd(std::abs(r), s) != 1) continue;
        auto E = simple_isocrystal(p, r, s);
        auto nu = newton_polygon(E);
        REQUIRE(nu.pairs().size() == 1);
        Rat expected(r, s);
        expected.canonicalize();
        CHECK(nu.pairs()[0].first == expected);
        CHECK(nu.pairs()[0].second == s);
        CHECK(is_admissible_newton(nu));
      }
    }
  }
}

TEST_CASE("siegel stratum dimensions") {
  CHECK(siegel_stratum_dimension(NewtonVector::from_slopes({Rat(1), Rat(0)}), 1) == 1);
  CHECK(siegel_stratum_dimension(NewtonVector::from_slopes({Rat(1, 2), Rat(1, 2)}), 1) == 0);
  CHECK(siegel_stratum_dimension(
            NewtonVector::from_slopes({Rat(1), Rat(1), Rat(0), Rat(0)}), 2) == 3);
  CHECK_THROWS_AS(
      siegel_stratum_dimension(NewtonVector::from_slopes({Rat(1), Rat(1)}), 1),
      NotPolarized);
}

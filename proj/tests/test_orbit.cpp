#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "phodge/orbit.hpp"

using namespace phodge;
using phodge::testing::descending_jumps;
using phodge::testing::random_flag;
using phodge::testing::random_isocrystal;
using phodge::testing::random_unimodular;
using phodge::testing::rational_matrix;

namespace {

NilpotentOperator shift_nilpotent(int p, int n) {
  // e_{k+1} -> e_k chain: ones on the superdiagonal.
  PMat m(p, n, n);
  for (int i = 0; i + 1 < n; ++i) m.at(i, i + 1) = PadicScalar::one(p);
  return NilpotentOperator(m);
}

NilpotentOperator random_nilpotent(int p, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-2, 2);
  PMat m(p, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      m.at(i, j) = PadicScalar::from_int(p, entry(rng));
  PMat g = random_unimodular(p, n, rng);
  PMat ginv = solve_in_span(g, PMat::identity(p, n));
  return NilpotentOperator(g * m * ginv);
}

FilteredSpace flag_line(int p, const PMat& line, const Rat& hi, const Rat& lo) {
  return FilteredSpace(p, line.rows(),
                       {FilStep{hi, line}, FilStep{lo, PMat::identity(p, line.rows())}});
}

}  // namespace

TEST_CASE("phi-N compatibility") {
  auto E = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto N = NilpotentOperator(rational_matrix(5, {{0, 1}, {0, 0}}));
  auto compat = phi_n_compat(N, E);
  REQUIRE(compat.r.has_value());
  CHECK(*compat.r == 1);

  auto zero = NilpotentOperator(PMat(5, 2, 2));
  CHECK(phi_n_compat(zero, E).any_r);

  auto id = Isocrystal(5, PMat::identity(5, 2));
  auto bad = phi_n_compat(N, id);
  CHECK(!bad.compatible());
}

TEST_CASE("orbit evaluation") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto e2 = rational_matrix(p, {{0}, {1}});
  auto F0 = flag_line(p, e2, Rat(1), Rat(0));

  auto t = PadicScalar::from_int(p, 10);
  auto Ft = orbit_eval(N, t, F0);
  // exp(tN) e2 = e2 + t e1.
  auto expected = rational_matrix(p, {{10}, {1}});
  CHECK(same_span(Ft.steps()[0].basis, expected));

  auto F_at0 = orbit_eval(N, PadicScalar::zero(p), F0);
  CHECK(same_span(F_at0.steps()[0].basis, e2));

  auto zero = NilpotentOperator(PMat(p, 2, 2));
  auto Fz = orbit_eval(zero, t, F0);
  CHECK(same_span(Fz.steps()[0].basis, e2));

  // Non-nilpotent mixed sums are rejected.
  auto N2 = NilpotentOperator(rational_matrix(p, {{0, 0}, {1, 0}}));
  CHECK_THROWS_AS(orbit_eval({N, N2}, {PadicScalar::one(p), PadicScalar::one(p)}, F0),
                  NotNilpotentSum);
}

TEST_CASE("multi-parameter orbit evaluation") {
  const int p = 5;
  // Commuting pair inside a 3-dim unipotent: e3 -> e1 and e3 -> e2.
  auto N1 = NilpotentOperator(rational_matrix(p, {{0, 0, 1}, {0, 0, 0}, {0, 0, 0}}));
  auto N2 = NilpotentOperator(rational_matrix(p, {{0, 0, 0}, {0, 0, 1}, {0, 0, 0}}));
  auto e3 = rational_matrix(p, {{0}, {0}, {1}});
  FilteredSpace F0(p, 3, {FilStep{Rat(1), e3}, FilStep{Rat(0), PMat::identity(p, 3)}});
  auto t1 = PadicScalar::from_int(p, 5);
  auto t2 = PadicScalar::from_int(p, 10);
  auto moved = orbit_eval({N1, N2}, {t1, t2}, F0);
  // exp(t1 N1 + t2 N2) e3 = e3 + t1 e1 + t2 e2.
  auto expected = rational_matrix(p, {{5}, {10}, {1}});
  CHECK(same_span(moved.steps()[0].basis, expected));
  // Composing the two single-parameter transports agrees (they commute).
  auto step1 = orbit_eval(N1, t1, F0);
  auto step2 = orbit_eval(N2, t2, step1);
  CHECK(same_span(step2.steps()[0].basis, moved.steps()[0].basis));
}

TEST_CASE("orbit limits") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto e2 = rational_matrix(p, {{0}, {1}});
  auto F0 = flag_line(p, e2, Rat(1), Rat(0));
  auto lim = orbit_limit(N, F0, true);
  CHECK(same_span(lim.steps()[0].basis, rational_matrix(p, {{1}, {0}})));

  auto zero = NilpotentOperator(PMat(p, 2, 2));
  auto lim0 = orbit_limit(zero, F0, true);
  CHECK(same_span(lim0.steps()[0].basis, e2));

  auto N3 = shift_nilpotent(p, 3);
  auto e3 = rational_matrix(p, {{0}, {0}, {1}});
  auto F3 = flag_line(p, e3, Rat(1), Rat(0));
  auto lim3 = orbit_limit(N3, F3, true);
  CHECK(same_span(lim3.steps()[0].basis, rational_matrix(p, {{1}, {0}, {0}})));
}

TEST_CASE("orbit limit invariance and idempotence") {
  std::mt19937_64 rng(31415);
  for (int iter = 0; iter < 25; ++iter) {
    std::uniform_int_distribution<int> dim(2, 4);
    const int n = dim(rng);
    auto N = random_nilpotent(3, n, rng);
    auto F0 = random_flag(3, n, descending_jumps(rng, 2), rng);
    auto lim = orbit_limit(N, F0, true);
    // exp(tN)-fixed for sample t, and idempotent.
    for (long tv : {1L, 3L, 9L}) {
      auto moved = orbit_eval(N, PadicScalar::from_int(3, tv), lim);
      for (size_t s = 0; s < lim.steps().size(); ++s)
        CHECK(same_span(moved.steps()[s].basis, lim.steps()[s].basis));
    }
    auto again = orbit_limit(N, lim, true);
    for (size_t s = 0; s < lim.steps().size(); ++s)
      CHECK(same_span(again.steps()[s].basis, lim.steps()[s].basis));
    // exp(tN) is unipotent: determinant exactly 1, and going back returns F0.
    auto t = PadicScalar::from_int(3, 3);
    auto fwd = orbit_eval(N, t, F0);
    auto back = orbit_eval(N, -t, fwd);
    for (size_t s = 0; s < F0.steps().size(); ++s)
      CHECK(same_span(back.steps()[s].basis, F0.steps()[s].basis));
  }
}

TEST_CASE("ps limits agree with orbit limits for cocharacter orbits") {
  // For lambda(t) = diag weights acting on a flag, the module-level limit
  // machinery and the filtration one compute the same thing.
  std::mt19937_64 rng(999);
  for (int iter = 0; iter < 10; ++iter) {
    auto F = random_flag(5, 3, descending_jumps(rng, 2), rng);
    OneParamSubgroup lam({1, 0, -1}, PMat::identity(5, 3));
    auto lim = ps_limit(lam, F, true);
    auto again = ps_limit(lam, lim, true);
    for (size_t s = 0; s < lim.steps().size(); ++s)
      CHECK(same_span(again.steps()[s].basis, lim.steps()[s].basis));
  }
}

TEST_CASE("nilpotent orbit check") {
  const int p = 5;
  auto E = Isocrystal(p, rational_matrix(p, {{1, 0}, {0, 5}}));
  auto zero = NilpotentOperator(PMat(p, 2, 2));
  auto verdict0 = nilpotent_orbit_check(zero, E, FilteredSpace::trivial(p, 2));
  CHECK(verdict0.is_orbit);
  CHECK(verdict0.compat.any_r);

  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto F0 = flag_line(p, rational_matrix(p, {{0}, {1}}), Rat(1), Rat(0));
  auto verdict = nilpotent_orbit_check(N, E, F0);
  CHECK(!verdict.is_orbit);
  CHECK(verdict.compat.r.has_value());
  REQUIRE(verdict.limit.has_value());
  CHECK(same_span(verdict.limit->steps()[0].basis, rational_matrix(p, {{1}, {0}})));
  CHECK(!verdict.semistability.semistable);

  auto simple = simple_isocrystal(p, 1, 2);
  auto verdict2 = nilpotent_orbit_check(zero, simple, F0);
  CHECK(verdict2.is_orbit);
}

TEST_CASE("twisted orbits") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto e2 = rational_matrix(p, {{0}, {1}});
  auto F0 = flag_line(p, e2, Rat(1), Rat(0));

  // Trivial Sen family reduces to the plain orbit at l = log(1+z).
  PeriodMapModel plain(F0, {PMat(p, 2, 2)}, 1);
  auto z = PadicScalar::from_int(p, 5);
  auto tw = twisted_orbit_eval(N, plain, z);
  auto direct = orbit_eval(N, padic_log(PadicScalar::from_int(p, 6)), F0);
  for (size_t s = 0; s < tw.steps().size(); ++s)
    CHECK(same_span(tw.steps()[s].basis, direct.steps()[s].basis));

  // z = 0 returns the base point.
  auto at0 = twisted_orbit_eval(N, plain, PadicScalar::zero(p));
  CHECK(same_span(at0.steps()[0].basis, e2));

  // A central Sen generator acts trivially on flags.
  PeriodMapModel central(F0, {PMat::identity(p, 2)}, 1);
  auto twc = twisted_orbit_eval(N, central, z);
  for (size_t s = 0; s < twc.steps().size(); ++s)
    CHECK(same_span(twc.steps()[s].basis, direct.steps()[s].basis));

  CHECK_THROWS_AS(twisted_orbit_eval(N, plain, PadicScalar::from_int(p, 2)),
                  OutOfDomain);
}

TEST_CASE("distance decay report") {
  const int p = 5;
  auto e2 = rational_matrix(p, {{0}, {1}});
  auto F0 = flag_line(p, e2, Rat(1), Rat(0));
  auto zero = NilpotentOperator(PMat(p, 2, 2));
  PeriodMapModel plain(F0, {PMat(p, 2, 2)}, 1);
  auto rep = distance_decay_report(zero, plain, {1, 2, 3});
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) CHECK(row.dist.is_zero());

  // Nonzero fixture: distances stop growing as val(z) grows.
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto rep2 = distance_decay_report(N, plain, {1, 2, 3, 4});
  REQUIRE(rep2.rows.size() == 4);
  for (size_t i = 1; i < rep2.rows.size(); ++i) {
    auto prev = rep2.rows[i - 1].dist.value(p);
    auto cur = rep2.rows[i].dist.value(p);
    CHECK(cur <= prev);
  }
}

TEST_CASE("conjugation limits") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto commuting = PMat::identity(p, 2) + N.matrix();
  auto res = conjugation_limit(N, commuting);
  CHECK(res.converged);
  CHECK((res.value - commuting).is_zero_at_precision());

  auto diag = rational_matrix(p, {{2, 0}, {0, 7}});
  auto res2 = conjugation_limit(N, diag);
  CHECK(!res2.converged);
  CHECK(res2.diverging_power == 1);
  CHECK(PadicScalar::agree(res2.coefficient.at(0, 1), PadicScalar::from_int(p, 5)));
  CHECK(res2.coefficient.at(1, 0).is_zero_at_precision());

  auto res3 = conjugation_limit(N, PMat::identity(p, 2));
  CHECK(res3.converged);

  // Converged limits commute with N.
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 10; ++iter) {
    auto M = random_nilpotent(p, 3, rng);
    auto g = PMat::identity(p, 3) + M.matrix().scaled(PadicScalar::from_int(p, 2));
    auto r = conjugation_limit(M, g);
    if (!r.converged) continue;
    auto comm = M.matrix() * r.value - r.value * M.matrix();
    CHECK(comm.is_zero_at_precision());
  }
}

TEST_CASE("jacobson-morozov triples") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto triple = jacobson_morozov(N);
  // Chain basis is (e2, e1), so H is diag(-1, 1) in ambient coordinates.
  CHECK(PadicScalar::agree(triple.semisimple.at(0, 0), PadicScalar::from_int(p, -1)));
  CHECK(PadicScalar::agree(triple.semisimple.at(1, 1), PadicScalar::one(p)));

  auto N3 = shift_nilpotent(p, 3);
  auto t3 = jacobson_morozov(N3);
  // Chain basis (e3, e2, e1): ambient weights are (-2, 0, 2).
  CHECK(PadicScalar::agree(t3.semisimple.at(0, 0), PadicScalar::from_int(p, -2)));
  CHECK(t3.semisimple.at(1, 1).is_zero_at_precision());
  CHECK(PadicScalar::agree(t3.semisimple.at(2, 2), PadicScalar::from_int(p, 2)));

  CHECK_THROWS_AS(jacobson_morozov(NilpotentOperator(PMat(p, 2, 2))), ZeroNilpotent);
}

TEST_CASE("sl2 triples on all Jordan types up to dim 5") {
  std::mt19937_64 rng(2025);
  const int p = 3;
  // Partitions of n <= 5 with at least one block of size >= 2.
  std::vector<std::vector<int>> partitions = {
      {2}, {2, 1}, {3}, {2, 2}, {3, 1}, {4}, {2, 1, 1}, {3, 2}, {4, 1}, {5},
      {2, 2, 1}, {3, 1, 1}, {2, 1, 1, 1}};
  for (const auto& part : partitions) {
    int n = 0;
    for (int b : part) n += b;
    PMat m(p, n, n);
    int off = 0;
    for (int b : part) {
      for (int i = 0; i + 1 < b; ++i) m.at(off + i, off + i + 1) = PadicScalar::one(p);
      off += b;
    }
    PMat g = random_unimodular(p, n, rng);
    PMat ginv = solve_in_span(g, PMat::identity(p, n));
    NilpotentOperator N(g * m * ginv);
    auto triple = jacobson_morozov(N);  // brackets verified internally
    // H has integer eigenvalues summing to zero: check trace.
    PadicScalar tr = PadicScalar::zero(p);
    for (int i = 0; i < n; ++i) tr = tr + triple.semisimple.at(i, i);
    CHECK(tr.is_zero_at_precision());
  }
}

TEST_CASE("monodromy weight filtration") {
  const int p = 5;
  auto N = NilpotentOperator(rational_matrix(p, {{0, 1}, {0, 0}}));
  auto M = monodromy_weight_filtration(N);
  REQUIRE(M.steps.size() == 2);
  CHECK(M.steps[0].index == -1);
  CHECK(same_span(M.steps[0].basis, rational_matrix(p, {{1}, {0}})));
  CHECK(M.steps[1].index == 1);
  CHECK(M.steps[1].basis.cols() == 2);

  auto M0 = monodromy_weight_filtration(NilpotentOperator(PMat(p, 3, 3)));
  REQUIRE(M0.steps.size() == 1);
  CHECK(M0.steps[0].index == 0);
  CHECK(M0.steps[0].basis.cols() == 3);

  auto M3 = monodromy_weight_filtration(shift_nilpotent(p, 3));
  REQUIRE(M3.steps.size() == 3);
  CHECK(M3.steps[0].index == -2);
  CHECK(M3.steps[1].index == 0);
  CHECK(M3.steps[2].index == 2);
  for (size_t i = 0; i < 3; ++i) CHECK(M3.steps[i].basis.cols() == static_cast<int>(i) + 1);
}

TEST_CASE("single jordan blocks give the full weight ladder") {
  const int p = 2;
  for (int m = 2; m <= 5; ++m) {
    auto M = monodromy_weight_filtration(shift_nilpotent(p, m));
    REQUIRE(static_cast<int>(M.steps.size()) == m);
    for (int i = 0; i < m; ++i) CHECK(M.steps[i].index == -(m - 1) + 2 * i);
  }
}

TEST_CASE("mixed graded check") {
  const int p = 5;
  auto F = flag_line(p, rational_matrix(p, {{1}, {0}}), Rat(1), Rat(0));
  WeightFiltration single;
  single.steps.push_back(WeightStep{0, PMat::identity(p, 2)});
  auto res = mixed_graded_check(single, F);
  CHECK(res.ok);
  REQUIRE(res.notes.size() == 1);

  WeightFiltration two;
  two.steps.push_back(WeightStep{0, rational_matrix(p, {{1}, {1}})});
  two.steps.push_back(WeightStep{2, PMat::identity(p, 2)});
  auto res2 = mixed_graded_check(two, F);
  CHECK(res2.ok);
  REQUIRE(res2.notes.size() == 2);

  WeightFiltration bad;
  bad.steps.push_back(WeightStep{0, rational_matrix(p, {{1}, {0}, {0}})});
  CHECK_THROWS_AS(mixed_graded_check(bad, F), ShapeMismatch);

  // With per-weight isocrystals the graded pieces are also checked for
  // semistability.
  std::vector<Isocrystal> good{Isocrystal(p, rational_matrix(p, {{1}})),
                               Isocrystal(p, rational_matrix(p, {{5}}))};
  auto res3 = mixed_graded_check(two, F, good);
  CHECK(res3.ok);
  // A graded piece carrying a destabilized filtration is flagged.
  WeightFiltration aligned;
  aligned.steps.push_back(WeightStep{0, rational_matrix(p, {{1, 0}, {0, 1}})});
  std::vector<Isocrystal> amb{Isocrystal(p, rational_matrix(p, {{1, 0}, {0, 5}}))};
  auto res4 = mixed_graded_check(aligned, F, amb);
  CHECK(!res4.ok);
}

TEST_CASE("orbit search") {
  const int p = 5;
  auto E = Isocrystal(p, rational_matrix(p, {{1, 0}, {0, 5}}));
  OrbitSearchConfig zero_pool;
  zero_pool.pool = {Rat(0), Rat(1)};
  auto found = orbit_search(E, {Rat(0), Rat(0)}, zero_pool);
  // The trivial filtration with N = 0 is always a valid instance.
  bool has_trivial = false;
  for (const auto& inst : found) {
    CHECK(inst.semistable);
    if (inst.N.is_zero_at_precision()) has_trivial = true;
  }
  CHECK(has_trivial);

  // Jump multiset {0,1}: outcome is recorded, and every returned instance
  // re-verifies.
  auto found2 = orbit_search(E, {Rat(1), Rat(0)}, zero_pool);
  for (const auto& inst : found2) {
    NilpotentOperator N(inst.N);
    auto verdict = nilpotent_orbit_check(N, E, inst.F0);
    CHECK(verdict.is_orbit);
  }
}

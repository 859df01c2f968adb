#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "phodge/filtration.hpp"

using namespace phodge;
using phodge::testing::descending_jumps;
using phodge::testing::random_flag;
using phodge::testing::random_isocrystal;
using phodge::testing::rational_matrix;

namespace {

FilteredSpace two_step(int p, const PMat& deep, const Rat& hi, const Rat& lo) {
  return FilteredSpace(p, deep.rows(),
                       {FilStep{hi, deep}, FilStep{lo, PMat::identity(p, deep.rows())}});
}

}  // namespace

TEST_CASE("degree and slope") {
  // dim 2, gr^0 = gr^1 = 1.
  auto F = two_step(5, rational_matrix(5, {{1}, {0}}), Rat(1), Rat(0));
  auto [deg, mu] = degree_and_slope(F);
  CHECK(deg == Rat(1));
  CHECK(mu == Rat(1, 2));

  // Frobenius diag(1, p^2) with the line e1 + p*e2 sitting in degrees [1,2]:
  // gr dims are 1 at jump 2 and 1 at jump 0.
  auto line = rational_matrix(5, {{1}, {5}});
  auto F34 = two_step(5, line, Rat(2), Rat(0));
  auto [deg34, mu34] = degree_and_slope(F34);
  CHECK(deg34 == Rat(2));
  CHECK(mu34 == Rat(1));

  auto triv = FilteredSpace::trivial(5, 3);
  auto [dt, mt] = degree_and_slope(triv);
  CHECK(dt == Rat(0));
  CHECK(mt == Rat(0));
}

TEST_CASE("induced filtration") {
  auto line = rational_matrix(5, {{1}, {5}});
  auto F = two_step(5, line, Rat(2), Rat(0));
  // Full space: unchanged.
  auto same = induced_filtration(F, PMat::identity(5, 2));
  REQUIRE(same.steps().size() == 2);
  CHECK(same.steps()[0].jump == Rat(2));
  CHECK(same.steps()[1].jump == Rat(0));

  // W = span(e1): the deep line misses it, single jump at 0.
  auto e1 = rational_matrix(5, {{1}, {0}});
  auto ind = induced_filtration(F, e1);
  REQUIRE(ind.steps().size() == 1);
  CHECK(ind.steps()[0].jump == Rat(0));
  CHECK(degree_and_slope(ind).second == Rat(0));

  // W inside the deepest step: single jump at the deepest index.
  auto ind2 = induced_filtration(F, line);
  REQUIRE(ind2.steps().size() == 1);
  CHECK(ind2.steps()[0].jump == Rat(2));
}

TEST_CASE("dual and tensor") {
  auto F = two_step(5, rational_matrix(5, {{1}, {0}}), Rat(1), Rat(0));
  auto Fd = dual_filtration(F);
  CHECK(degree_and_slope(Fd).second == Rat(-1, 2));

  auto unit_line = FilteredSpace(5, 1, {FilStep{Rat(0), PMat::identity(5, 1)}});
  auto Ft = tensor_filtration(F, unit_line);
  REQUIRE(Ft.steps().size() == F.steps().size());
  for (size_t i = 0; i < Ft.steps().size(); ++i) {
    CHECK(Ft.steps()[i].jump == F.steps()[i].jump);
    CHECK(Ft.steps()[i].basis.cols() == F.steps()[i].basis.cols());
  }

  std::mt19937_64 rng(555);
  for (int iter = 0; iter < 12; ++iter) {
    auto A = random_flag(5, 2, descending_jumps(rng, 2), rng);
    auto B = random_flag(5, 2, descending_jumps(rng, 2), rng);
    auto [da, ma] = degree_and_slope(A);
    auto [db, mb] = degree_and_slope(B);
    CHECK(degree_and_slope(tensor_filtration(A, B)).second == ma + mb);
    CHECK(degree_and_slope(dual_filtration(A)).second == -ma);
  }
}

TEST_CASE("filtration pairing") {
  auto flag = two_step(5, rational_matrix(5, {{1}, {0}}), Rat(1), Rat(0));
  CHECK(filtration_pairing(flag, flag) == Rat(1));

  auto triv = FilteredSpace::trivial(5, 2, Rat(0));
  CHECK(filtration_pairing(flag, triv) == Rat(0));

  auto Fe2 = two_step(5, rational_matrix(5, {{0}, {1}}), Rat(1), Rat(0));
  auto lam = OneParamSubgroup::diagonal(5, {0, 1});
  CHECK(filtration_pairing(Fe2, filtration_from_1ps(lam)) == Rat(1));

  std::mt19937_64 rng(88);
  for (int iter = 0; iter < 10; ++iter) {
    auto A = random_flag(5, 3, descending_jumps(rng, 2), rng);
    auto B = random_flag(5, 3, descending_jumps(rng, 3), rng);
    CHECK(filtration_pairing(A, B) == filtration_pairing(B, A));
  }
}

TEST_CASE("filtration from one-parameter subgroups") {
  auto lam = OneParamSubgroup::diagonal(5, {1, 0});
  auto F = filtration_from_1ps(lam);
  REQUIRE(F.steps().size() == 2);
  CHECK(F.steps()[0].jump == Rat(1));
  CHECK(same_span(F.steps()[0].basis, rational_matrix(5, {{1}, {0}})));
  CHECK(F.steps()[1].basis.cols() == 2);

  auto triv = filtration_from_1ps(OneParamSubgroup::diagonal(5, {0, 0, 0}));
  REQUIRE(triv.steps().size() == 1);
  CHECK(triv.steps()[0].jump == Rat(0));

  auto lam2 = OneParamSubgroup::diagonal(5, {2, 2, -1});
  auto F2 = filtration_from_1ps(lam2);
  REQUIRE(F2.steps().size() == 2);
  CHECK(F2.steps()[0].jump == Rat(2));
  CHECK(F2.steps()[0].basis.cols() == 2);
  CHECK(F2.steps()[1].jump == Rat(-1));
}

TEST_CASE("ps limits") {
  // lambda = diag(1, t), W = span(e1 + e2): t -> 0 keeps e1.
  auto lam = OneParamSubgroup::diagonal(5, {0, 1});
  auto W = rational_matrix(5, {{1}, {1}});
  auto F0 = two_step(5, W, Rat(1), Rat(0));
  auto Flim = ps_limit(lam, F0, true);
  CHECK(same_span(Flim.steps()[0].basis, rational_matrix(5, {{1}, {0}})));

  // A frame-aligned flag is fixed.
  auto aligned = two_step(5, rational_matrix(5, {{0}, {1}}), Rat(1), Rat(0));
  auto fixed = ps_limit(lam, aligned, true);
  CHECK(same_span(fixed.steps()[0].basis, aligned.steps()[0].basis));

  // Pairing invariance check for the first example; both sides vanish.
  auto Flam = filtration_from_1ps(lam);
  CHECK(filtration_pairing(Flim, Flam) == filtration_pairing(F0, Flam));
  CHECK(filtration_pairing(Flim, Flam) == Rat(0));
}

TEST_CASE("ps limit pairing invariance and idempotence") {
  std::mt19937_64 rng(2468);
  std::uniform_int_distribution<int> dim(2, 4);
  std::uniform_int_distribution<Int> w(-2, 2);
  for (int iter = 0; iter < 60; ++iter) {
    const int n = dim(rng);
    std::vector<Int> ws;
    for (int i = 0; i < n; ++i) ws.push_back(w(rng));
    OneParamSubgroup lam(ws, phodge::testing::random_unimodular(5, n, rng));
    auto F = random_flag(5, n, descending_jumps(rng, std::min(n, 2)), rng);
    auto Flim = ps_limit(lam, F, true);
    auto Flam = filtration_from_1ps(lam);
    CHECK(filtration_pairing(Flim, Flam) == filtration_pairing(F, Flam));
    auto again = ps_limit(lam, Flim, true);
    for (size_t i = 0; i < Flim.steps().size(); ++i)
      CHECK(same_span(again.steps()[i].basis, Flim.steps()[i].basis));
  }
}

TEST_CASE("subobject enumeration") {
  auto diag = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto en = enumerate_subisocrystals(diag);
  CHECK(en.complete);
  REQUIRE(en.subspaces.size() == 4);
  CHECK(en.subspaces[0].cols() == 0);
  CHECK(en.subspaces[3].cols() == 2);

  auto simple = simple_isocrystal(5, 1, 2);
  auto en2 = enumerate_subisocrystals(simple);
  CHECK(en2.complete);
  REQUIRE(en2.subspaces.size() == 2);

  // diag(1, p, p): isoclinic double block stays whole without generators.
  auto trip = Isocrystal(5, rational_matrix(5, {{1, 0, 0}, {0, 5, 0}, {0, 0, 5}}));
  auto en3 = enumerate_subisocrystals(trip);
  CHECK(!en3.complete);
  CHECK(en3.subspaces.size() == 4);  // 0, e1, (e2,e3), V
  // A declared line inside the isoclinic block extends the enumeration.
  auto gen = rational_matrix(5, {{0}, {1}, {1}});
  auto en4 = enumerate_subisocrystals(trip, {gen});
  bool has_line = false, has_sum = false;
  for (const auto& W : en4.subspaces) {
    if (W.cols() == 1 && same_span(W, gen)) has_line = true;
    if (W.cols() == 2 &&
        same_span(W, sum_spans(gen, rational_matrix(5, {{1}, {0}, {0}}))))
      has_sum = true;
  }
  CHECK(has_line);
  CHECK(has_sum);
  // Unstable generators are rejected.
  CHECK_THROWS_AS(
      enumerate_subisocrystals(diag, {rational_matrix(5, {{1}, {1}})}),
      NotStable);
}

TEST_CASE("semistability brute force") {
  auto diag = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto e1 = rational_matrix(5, {{1}, {0}});
  auto F = two_step(5, e1, Rat(1), Rat(0));
  auto verdict = is_semistable(diag, F);
  CHECK(!verdict.semistable);
  REQUIRE(verdict.witness.has_value());
  CHECK(same_span(*verdict.witness, e1));
  CHECK(verdict.witness_slope == Rat(1));
  CHECK(verdict.ambient_slope == Rat(1, 2));

  CHECK(is_semistable(diag, FilteredSpace::trivial(5, 2)).semistable);

  // Frobenius diag(1, p^2), flag line e1 + p e2 in degrees [1,2]: semistable.
  auto E34 = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 25}}));
  auto F34 = two_step(5, rational_matrix(5, {{1}, {5}}), Rat(2), Rat(0));
  auto v34 = is_semistable(E34, F34);
  CHECK(v34.semistable);
}

TEST_CASE("harder-narasimhan filtration") {
  auto diag = Isocrystal(5, rational_matrix(5, {{1, 0}, {0, 5}}));
  auto e1 = rational_matrix(5, {{1}, {0}});
  auto F = two_step(5, e1, Rat(1), Rat(0));
  auto hn = hn_filtration(diag, F);
  REQUIRE(hn.size() == 2);
  CHECK(same_span(hn[0].basis, e1));
  CHECK(hn[0].slope == Rat(1));
  CHECK(hn[1].slope == Rat(0));

  // Semistable input: single step.
  auto hn2 = hn_filtration(diag, FilteredSpace::trivial(5, 2));
  REQUIRE(hn2.size() == 1);
  CHECK(hn2[0].basis.cols() == 2);

  // diag(1, p, p^2) with F^1 = (e1,e2), F^2 = e1.
  auto trip = Isocrystal(5, rational_matrix(5, {{1, 0, 0}, {0, 5, 0}, {0, 0, 25}}));
  auto F3 = FilteredSpace(
      5, 3,
      {FilStep{Rat(2), rational_matrix(5, {{1}, {0}, {0}})},
       FilStep{Rat(1), rational_matrix(5, {{1, 0}, {0, 1}, {0, 0}})},
       FilStep{Rat(0), PMat::identity(5, 3)}});
  auto hn3 = hn_filtration(trip, F3);
  REQUIRE(hn3.size() == 3);
  CHECK(hn3[0].basis.cols() == 1);
  CHECK(hn3[0].slope == Rat(2));
  CHECK(hn3[1].basis.cols() == 2);
  CHECK(hn3[1].slope == Rat(1));
  CHECK(hn3[2].slope == Rat(0));
}

TEST_CASE("hn graded pieces are semistable") {
  std::mt19937_64 rng(9182);
  for (int iter = 0; iter < 10; ++iter) {
    auto E = random_isocrystal(3, {2, 1, 0}, rng);
    auto F = random_flag(3, 3, descending_jumps(rng, 3), rng);
    auto hn = hn_filtration(E, F);
    for (size_t i = 1; i < hn.size(); ++i) CHECK(hn[i - 1].slope > hn[i].slope);
    const int p = 3;
    PMat prev(p, 3, 0);
    for (const auto& step : hn) {
      auto piece = quotient_piece(E, F, prev, step.basis);
      auto verdict = is_semistable(piece.E, piece.F);
      CHECK(verdict.semistable);
      CHECK(degree_and_slope(piece.F).second == step.slope);
      prev = step.basis;
    }
  }
}

TEST_CASE("hilbert-mumford invariant") {
  auto Fe2 = two_step(5, rational_matrix(5, {{0}, {1}}), Rat(1), Rat(0));
  CHECK(hm_invariant(Fe2, OneParamSubgroup::diagonal(5, {0, 1})) == Rat(-1));

  CHECK(hm_invariant(Fe2, OneParamSubgroup::diagonal(5, {0, 0})) == Rat(0));

  auto Fe1 = two_step(5, rational_matrix(5, {{1}, {0}}), Rat(1), Rat(0));
  CHECK(hm_invariant(Fe1, OneParamSubgroup::diagonal(5, {-1, 1})) == Rat(1));
}

TEST_CASE("hm criterion agrees with brute force on eigenframe candidates") {
  std::mt19937_64 rng(777);
  for (int iter = 0; iter < 20; ++iter) {
    std::uniform_int_distribution<int> pick(0, 2);
    auto E = random_isocrystal(3, {2, 1, 0}, rng);
    auto F = random_flag(3, 3, descending_jumps(rng, pick(rng) + 1), rng);
    auto verdict = is_semistable(E, F);
    // Candidate 1-PS: zero-sum weights in [-2,2] on the eigenframe.
    auto parts = slope_decomposition(E);
    PMat frame(3, 3, 0);
    for (const auto& part : parts) frame = frame.cols() ? frame.hcat(part.basis) : part.basis;
    bool all_nonpositive = true;
    for (Int a = -2; a <= 2; ++a)
      for (Int b = -2; b <= 2; ++b) {
        Int c = -a - b;
        if (c < -2 || c > 2) continue;
        OneParamSubgroup lam({a, b, c}, frame);
        if (hm_invariant(F, lam) > 0) all_nonpositive = false;
      }
    CHECK(verdict.semistable == all_nonpositive);
  }
}

TEST_CASE("flag distance") {
  auto e1 = rational_matrix(5, {{1}, {0}});
  auto F = two_step(5, e1, Rat(1), Rat(0));
  CHECK(flag_distance(F, F).is_zero());
  CHECK(flag_distance(F, F).to_string() == "0");

  auto nearby = two_step(5, rational_matrix(5, {{1}, {5}}), Rat(1), Rat(0));
  auto d = flag_distance(F, nearby);
  REQUIRE(d.exponent.has_value());
  CHECK(*d.exponent == 1);
  CHECK(d.value(5) == Rat(1, 5));

  auto e2flag = two_step(5, rational_matrix(5, {{0}, {1}}), Rat(1), Rat(0));
  auto d2 = flag_distance(F, e2flag);
  REQUIRE(d2.exponent.has_value());
  CHECK(*d2.exponent == 0);
  CHECK(d2.value(5) == Rat(1));

  CHECK_THROWS_AS(flag_distance(F, FilteredSpace::trivial(5, 2)), ShapeMismatch);
}

TEST_CASE("flag distance ultrametric triangle") {
  std::mt19937_64 rng(1213);
  for (int iter = 0; iter < 60; ++iter) {
    auto jumps = descending_jumps(rng, 2);
    auto A = random_flag(5, 3, jumps, rng);
    auto B = random_flag(5, 3, jumps, rng);
    auto C = random_flag(5, 3, jumps, rng);
    auto dab = flag_distance(A, B).value(5);
    auto dbc = flag_distance(B, C).value(5);
    auto dac = flag_distance(A, C).value(5);
    CHECK(dac <= std::max(dab, dbc));
  }
}

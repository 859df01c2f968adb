#include "phodge/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "phodge/fourier.hpp"
#include "phodge/orbit.hpp"

namespace phodge {

namespace {

Rat random_rat(std::mt19937_64& rng, int span = 20) {
  std::uniform_int_distribution<int> num(-span, span);
  std::uniform_int_distribution<int> den(1, span);
  Rat q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

PMat unimodular(int prime, int n, std::mt19937_64& rng, int rounds = 6) {
  std::vector<std::vector<Rat>> rows(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) rows[i][i] = Rat(1);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int k = 0; k < rounds; ++k) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Rat c(coef(rng));
    for (int col = 0; col < n; ++col) rows[i][col] += c * rows[j][col];
  }
  return PMat::from_rational_rows(prime, rows);
}

Isocrystal conj_diag(int prime, const std::vector<Int>& vals, std::mt19937_64& rng) {
  const int n = static_cast<int>(vals.size());
  std::uniform_int_distribution<int> unit(1, prime - 1);
  PMat d(prime, n, n);
  for (int i = 0; i < n; ++i)
    d.at(i, i) = PadicScalar::p_power(prime, vals[i]) *
                 PadicScalar::from_int(prime, unit(rng));
  PMat g = unimodular(prime, n, rng);
  PMat ginv = solve_in_span(g, PMat::identity(prime, n));
  return Isocrystal(prime, g * d * ginv);
}

FilteredSpace random_full_flag(int prime, int n, int step_count, std::mt19937_64& rng) {
  PMat g = unimodular(prime, n, rng);
  std::uniform_int_distribution<int> gap(1, 3);
  std::vector<FilStep> steps;
  int start = gap(rng) + step_count;
  int prev_dim = 0;
  for (int i = 0; i < step_count; ++i) {
    int dim = (i + 1 == step_count) ? n : std::max(prev_dim + 1, (n * (i + 1)) / step_count);
    if (dim <= prev_dim) continue;
    steps.push_back(FilStep{Rat(start), g.col_range(0, dim)});
    start -= gap(rng);
    prev_dim = dim;
  }
  if (steps.back().basis.cols() != n)
    steps.push_back(FilStep{Rat(start), PMat::identity(prime, n)});
  return FilteredSpace(prime, n, std::move(steps));
}

NilpotentOperator random_nilpotent(int prime, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> entry(-2, 2);
  PMat m(prime, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.at(i, j) = PadicScalar::from_int(prime, entry(rng));
  PMat g = unimodular(prime, n, rng);
  PMat ginv = solve_in_span(g, PMat::identity(prime, n));
  return NilpotentOperator(g * m * ginv);
}

struct Checker {
  VerifyLine line;
  explicit Checker(std::string name) { line.name = std::move(name); }
  void fail(const std::string& dump) {
    if (line.pass) {
      line.pass = false;
      line.counterexample = dump;
    }
  }
  VerifyLine done(std::string details) {
    line.details = std::move(details);
    return line;
  }
};

VerifyReport padic_suite(unsigned long seed) {
  VerifyReport report{"padic", {}};
  std::mt19937_64 rng(seed + 11);

  {
    Checker c("ultrametric-valuation");
    int cases = 0;
    for (int p : {2, 3, 5}) {
      for (int iter = 0; iter < 200; ++iter) {
        Rat qa = random_rat(rng), qb = random_rat(rng);
        if (qa == 0 || qb == 0 || qa + qb == 0) continue;
        auto a = PadicScalar::from_rational(p, qa);
        auto b = PadicScalar::from_rational(p, qb);
        auto s = a + b;
        ++cases;
        if (s.val_lower_bound() < std::min(a.valuation(), b.valuation()) ||
            (a.valuation() != b.valuation() &&
             s.valuation() != std::min(a.valuation(), b.valuation())))
          c.fail("a=" + rat_to_string(qa) + " b=" + rat_to_string(qb) +
                 " p=" + std::to_string(p));
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases"));
  }
  {
    Checker c("exp-log-round-trip");
    int cases = 0;
    for (int p : {2, 3, 5}) {
      const Int vmin = (p == 2) ? 2 : 1;
      for (int iter = 0; iter < 100; ++iter) {
        Rat q = random_rat(rng, 9);
        if (q == 0) continue;
        auto y = PadicScalar::from_rational(p, q);
        if (y.valuation() < 0) continue;
        y = y.shifted(vmin);
        ++cases;
        if (!PadicScalar::agree(padic_log(padic_exp(y)), y))
          c.fail("log(exp(y)) != y at y=" + y.to_string());
        auto x = PadicScalar::one(p) + y;
        if (!PadicScalar::agree(padic_exp(padic_log(x)), x))
          c.fail("exp(log(x)) != x at x=" + x.to_string());
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases"));
  }
  {
    Checker c("binomial-series-reproduces-powers");
    for (int y = 0; y <= 10; ++y) {
      RatPoly sum;
      RatPoly zpow = RatPoly::constant(Rat(1));
      RatPoly z = RatPoly::variable();
      for (int n = 0; n <= y; ++n) {
        sum = sum + zpow.scaled(binomial_poly(n).eval(Rat(y)));
        zpow = zpow * z;
      }
      RatPoly direct = RatPoly::constant(Rat(1));
      for (int i = 0; i < y; ++i) direct = direct * RatPoly({Rat(1), Rat(1)});
      for (int i = 0; i <= std::max(sum.degree(), direct.degree()); ++i)
        if (sum.coeff(i) != direct.coeff(i)) c.fail("y=" + std::to_string(y));
    }
    report.lines.push_back(c.done("integer exponents 0..10, exact"));
  }
  {
    Checker c("binomial-cocycle");
    std::vector<RatPoly> ps;
    for (int n = 0; n <= 12; ++n) ps.push_back(binomial_poly(n));
    for (int iter = 0; iter < 20; ++iter) {
      Rat y = random_rat(rng), yp = random_rat(rng);
      for (int n = 0; n <= 12; ++n) {
        Rat rhs(0);
        for (int i = 0; i <= n; ++i) rhs += ps[i].eval(y) * ps[n - i].eval(yp);
        if (ps[n].eval(y + yp) != rhs)
          c.fail("n=" + std::to_string(n) + " y=" + rat_to_string(y) + " y'=" +
                 rat_to_string(yp));
      }
    }
    report.lines.push_back(c.done("n <= 12, 20 rational pairs, exact"));
  }
  {
    Checker c("gauss-norm-multiplicative");
    int cases = 0;
    for (int p : {2, 3, 5}) {
      for (int iter = 0; iter < 40; ++iter) {
        std::uniform_int_distribution<int> deg(1, 4);
        std::vector<Rat> ca, cb;
        for (int i = deg(rng); i >= 0; --i) ca.push_back(random_rat(rng));
        for (int i = deg(rng); i >= 0; --i) cb.push_back(random_rat(rng));
        RatPoly f(ca), g(cb);
        if (f.is_zero() || g.is_zero()) continue;
        for (Int n : {0LL, 1LL, 2LL}) {
          auto vf = gauss_norm_val(f, p, Rat(0), n, Rat(1, p - 1));
          auto vg = gauss_norm_val(g, p, Rat(0), n, Rat(1, p - 1));
          auto vfg = gauss_norm_val(f * g, p, Rat(0), n, Rat(1, p - 1));
          ++cases;
          if (!vf || !vg || !vfg || *vfg != *vf + *vg)
            c.fail("p=" + std::to_string(p) + " n=" + std::to_string(n));
        }
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases, exact"));
  }
  return report;
}

VerifyReport isocrystal_suite(unsigned long seed) {
  VerifyReport report{"isocrystal", {}};
  std::mt19937_64 rng(seed + 23);
  {
    Checker c("newton-matches-eigenvalue-valuations");
    int cases = 0;
    for (int p : {2, 3, 5}) {
      for (int iter = 0; iter < 30; ++iter) {
        std::uniform_int_distribution<int> dim(2, 4), val(-2, 3);
        std::vector<Int> vals;
        for (int i = dim(rng); i > 0; --i) vals.push_back(val(rng));
        auto E = conj_diag(p, vals, rng);
        auto nu = newton_polygon(E).flat();
        std::sort(vals.begin(), vals.end(), std::greater<>());
        ++cases;
        for (size_t i = 0; i < nu.size(); ++i)
          if (nu[i] != Rat(static_cast<long>(vals[i])))
            c.fail("p=" + std::to_string(p) + " case " + std::to_string(iter));
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " random conjugated matrices"));
  }
  {
    Checker c("newton-direct-sum-merge");
    for (int iter = 0; iter < 30; ++iter) {
      std::uniform_int_distribution<int> val(-2, 2);
      auto A = conj_diag(3, {val(rng), val(rng)}, rng);
      auto B = conj_diag(3, {val(rng)}, rng);
      PMat block(3, 3, 3);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) block.at(i, j) = A.frobenius().at(i, j);
      block.at(2, 2) = B.frobenius().at(0, 0);
      Isocrystal sum(3, block);
      std::vector<Rat> merged = newton_polygon(A).flat();
      for (const auto& s : newton_polygon(B).flat()) merged.push_back(s);
      if (!(NewtonVector::from_slopes(merged) == newton_polygon(sum)))
        c.fail("case " + std::to_string(iter));
      if (newton_polygon(sum).sum() !=
          Rat(static_cast<long>(det(sum.frobenius()).valuation())))
        c.fail("slope sum vs det valuation, case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("30 block sums, exact"));
  }
  {
    Checker c("simple-objects-isoclinic-admissible");
    for (int p : {2, 3, 5}) {
      for (long s = 1; s <= 5; ++s)
        for (long r = -5; r <= 5; ++r) {
          if (std::gcd(std::abs(r), s) != 1) continue;
          auto nu = newton_polygon(simple_isocrystal(p, r, s));
          Rat expect(r, s);
          expect.canonicalize();
          if (nu.pairs().size() != 1 || nu.pairs()[0].first != expect ||
              nu.pairs()[0].second != s || !is_admissible_newton(nu))
            c.fail("(r,s)=(" + std::to_string(r) + "," + std::to_string(s) + ")");
        }
    }
    report.lines.push_back(c.done("all coprime (r,s), s <= 5, |r| <= 5, p in {2,3,5}"));
  }
  {
    Checker c("slope-parts-stable-isoclinic");
    for (int iter = 0; iter < 15; ++iter) {
      auto E = conj_diag(3, {2, 1, 0}, rng);
      for (const auto& part : slope_decomposition(E)) {
        if (!contains_span(part.basis, E.frobenius() * part.basis))
          c.fail("instability at case " + std::to_string(iter));
        PMat restricted = solve_in_span(part.basis, E.frobenius() * part.basis);
        auto nu = newton_polygon(Isocrystal(3, restricted));
        if (nu.pairs().size() != 1 || nu.pairs()[0].first != part.slope)
          c.fail("induced slopes at case " + std::to_string(iter));
      }
    }
    report.lines.push_back(c.done("15 cases, dims 3"));
  }
  {
    Checker c("newton-partial-order");
    std::uniform_int_distribution<int> v(0, 3);
    for (int iter = 0; iter < 60; ++iter) {
      std::vector<Rat> x{Rat(v(rng)), Rat(v(rng)), Rat(v(rng))};
      std::vector<Rat> y{x[1], x[2], x[0]}, z{x[2], x[0], x[1]};
      auto nx = NewtonVector::from_slopes(x);
      auto ny = NewtonVector::from_slopes(y);
      auto nz = NewtonVector::from_slopes(z);
      if (!newton_leq(nx, nx)) c.fail("reflexivity");
      if (newton_leq(nx, ny) && newton_leq(ny, nx) && !(nx == ny)) c.fail("antisymmetry");
      if (newton_leq(nx, ny) && newton_leq(ny, nz) && !newton_leq(nx, nz))
        c.fail("transitivity");
    }
    report.lines.push_back(c.done("60 random triples"));
  }
  {
    Checker c("factorization-conservation");
    int cases = 0;
    for (int p : {2, 3, 5}) {
      for (int iter = 0; iter < 20; ++iter) {
        std::uniform_int_distribution<int> val(-1, 2), unit(1, p - 1), deg(2, 4);
        auto f = PadicPoly::from_rationals(p, {Rat(1)});
        Int const_val = 0;
        int n = deg(rng);
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
        ++cases;
        if (total_deg != n || total_val != const_val)
          c.fail("p=" + std::to_string(p) + " case " + std::to_string(iter));
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " random split polynomials"));
  }
  return report;
}

VerifyReport filtration_suite(unsigned long seed) {
  VerifyReport report{"filtration", {}};
  std::mt19937_64 rng(seed + 37);
  {
    Checker c("Eq82-pairing-invariance");
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_int_distribution<Int> w(-2, 2);
    int cases = 0;
    while (cases < 200) {
      const int n = dim(rng);
      std::vector<Int> ws;
      for (int i = 0; i < n; ++i) ws.push_back(w(rng));
      OneParamSubgroup lam(ws, unimodular(5, n, rng));
      auto F = random_full_flag(5, n, std::min(n, 2), rng);
      auto Flam = filtration_from_1ps(lam);
      auto Flim = ps_limit(lam, F, true);
      ++cases;
      if (filtration_pairing(Flim, Flam) != filtration_pairing(F, Flam))
        c.fail("case " + std::to_string(cases));
    }
    report.lines.push_back(c.done("200 cases"));
  }
  {
    Checker c("ps-limit-idempotent");
    std::uniform_int_distribution<int> dim(2, 4);
    std::uniform_int_distribution<Int> w(-2, 2);
    for (int iter = 0; iter < 100; ++iter) {
      const int n = dim(rng);
      std::vector<Int> ws;
      for (int i = 0; i < n; ++i) ws.push_back(w(rng));
      OneParamSubgroup lam(ws, unimodular(5, n, rng));
      auto F = random_full_flag(5, n, std::min(n, 2), rng);
      auto Flim = ps_limit(lam, F, true);
      auto again = ps_limit(lam, Flim, true);
      for (size_t s = 0; s < Flim.steps().size(); ++s)
        if (!same_span(again.steps()[s].basis, Flim.steps()[s].basis))
          c.fail("case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("100 cases"));
  }
  {
    Checker c("hn-decreasing-semistable-unique");
    int cases = 0;
    for (int iter = 0; iter < 25; ++iter) {
      std::uniform_int_distribution<int> dim(2, 4), steps(1, 3);
      const int n = dim(rng);
      std::vector<Int> vals;
      for (int i = 0; i < n; ++i) vals.push_back(i);  // distinct valuations
      auto E = conj_diag(3, vals, rng);
      auto F = random_full_flag(3, n, std::min(n, steps(rng)), rng);
      auto hn = hn_filtration(E, F);
      ++cases;
      for (size_t i = 1; i < hn.size(); ++i)
        if (!(hn[i - 1].slope > hn[i].slope)) c.fail("slopes at case " + std::to_string(iter));
      PMat prev(3, n, 0);
      for (const auto& step : hn) {
        if (step.basis.cols() < n || prev.cols() > 0) {
          auto piece = quotient_piece(E, F, prev, step.basis);
          if (!is_semistable(piece.E, piece.F).semistable)
            c.fail("graded piece at case " + std::to_string(iter));
        } else if (!is_semistable(E, F).semistable) {
          c.fail("single-step case " + std::to_string(iter));
        }
        prev = step.basis;
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " random filtered isocrystals"));
  }
  {
    Checker c("hm-brute-force-agreement");
    int cases = 0;
    for (int iter = 0; iter < 25; ++iter) {
      std::uniform_int_distribution<int> steps(1, 3);
      auto E = conj_diag(3, {2, 1, 0}, rng);
      auto F = random_full_flag(3, 3, steps(rng), rng);
      auto verdict = is_semistable(E, F);
      auto parts = slope_decomposition(E);
      PMat frame(3, 3, 0);
      for (const auto& part : parts)
        frame = frame.cols() ? frame.hcat(part.basis) : part.basis;
      bool all_nonpositive = true;
      for (Int a = -2; a <= 2; ++a)
        for (Int b = -2; b <= 2; ++b) {
          Int cw = -a - b;
          if (cw < -2 || cw > 2) continue;
          OneParamSubgroup lam({a, b, cw}, frame);
          if (hm_invariant(F, lam) > 0) all_nonpositive = false;
        }
      ++cases;
      if (verdict.semistable != all_nonpositive) c.fail("case " + std::to_string(iter));
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases, eigenframe candidates"));
  }
  {
    Checker c("flag-distance-ultrametric");
    int cases = 0;
    for (int iter = 0; iter < 170; ++iter) {
      std::uniform_int_distribution<int> dim(2, 4);
      const int n = dim(rng);
      std::vector<Rat> jumps{Rat(1), Rat(0)};
      auto mk = [&](std::mt19937_64& r) {
        PMat g = unimodular(5, n, r);
        return FilteredSpace(5, n, {FilStep{jumps[0], g.col_range(0, std::max(1, n / 2))},
                                    FilStep{jumps[1], PMat::identity(5, n)}});
      };
      auto A = mk(rng), B = mk(rng), C = mk(rng);
      auto dab = flag_distance(A, B).value(5);
      auto dbc = flag_distance(B, C).value(5);
      auto dac = flag_distance(A, C).value(5);
      ++cases;
      if (dac > std::max(dab, dbc)) c.fail("case " + std::to_string(iter));
    }
    report.lines.push_back(c.done(std::to_string(cases) + " random triples"));
  }
  {
    Checker c("derived-slope-identities");
    for (int iter = 0; iter < 30; ++iter) {
      auto A = random_full_flag(5, 2, 2, rng);
      auto B = random_full_flag(5, 2, 2, rng);
      auto ma = degree_and_slope(A).second;
      auto mb = degree_and_slope(B).second;
      if (degree_and_slope(tensor_filtration(A, B)).second != ma + mb)
        c.fail("tensor at case " + std::to_string(iter));
      if (degree_and_slope(dual_filtration(A)).second != -ma)
        c.fail("dual at case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("30 random pairs, exact"));
  }
  return report;
}

VerifyReport orbit_suite(unsigned long seed) {
  VerifyReport report{"orbit", {}};
  std::mt19937_64 rng(seed + 41);
  {
    Checker c("exp-unipotent-round-trip");
    for (int iter = 0; iter < 50; ++iter) {
      std::uniform_int_distribution<int> dim(2, 4);
      const int n = dim(rng);
      auto N = random_nilpotent(3, n, rng);
      auto F = random_full_flag(3, n, 2, rng);
      auto t = PadicScalar::from_int(3, 3);
      PMat A = N.matrix().scaled(t);
      PMat U = PMat::identity(3, n);
      PMat power = PMat::identity(3, n);
      mpz_class fact(1);
      for (int k = 1; k < n; ++k) {
        power = power * A;
        fact *= k;
        U = U + power.scaled(PadicScalar::from_integer(3, fact).inverse());
      }
      if (!PadicScalar::agree(det(U), PadicScalar::one(3)))
        c.fail("det at case " + std::to_string(iter));
      auto fwd = orbit_eval(N, t, F);
      auto back = orbit_eval(N, -t, fwd);
      for (size_t s = 0; s < F.steps().size(); ++s)
        if (!same_span(back.steps()[s].basis, F.steps()[s].basis))
          c.fail("round trip at case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("50 cases"));
  }
  {
    Checker c("orbit-limit-fixed-idempotent");
    for (int iter = 0; iter < 50; ++iter) {
      std::uniform_int_distribution<int> dim(2, 4);
      const int n = dim(rng);
      auto N = random_nilpotent(3, n, rng);
      auto F = random_full_flag(3, n, 2, rng);
      auto lim = orbit_limit(N, F, true);
      for (long tv : {1L, 3L}) {
        auto moved = orbit_eval(N, PadicScalar::from_int(3, tv), lim);
        for (size_t s = 0; s < lim.steps().size(); ++s)
          if (!same_span(moved.steps()[s].basis, lim.steps()[s].basis))
            c.fail("fixedness at case " + std::to_string(iter));
      }
      auto again = orbit_limit(N, lim, true);
      for (size_t s = 0; s < lim.steps().size(); ++s)
        if (!same_span(again.steps()[s].basis, lim.steps()[s].basis))
          c.fail("idempotence at case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("50 cases"));
  }
  {
    Checker c("ps-limit-bridge");
    for (int iter = 0; iter < 25; ++iter) {
      std::uniform_int_distribution<int> dim(2, 3);
      std::uniform_int_distribution<Int> w(0, 3);
      const int n = dim(rng);
      std::vector<Int> ws;
      for (int i = 0; i < n; ++i) ws.push_back(w(rng));
      OneParamSubgroup lam = OneParamSubgroup::diagonal(5, ws);
      auto F = random_full_flag(5, n, 2, rng);
      auto via_ps = ps_limit(lam, F, true);
      // Same limit through the generic polynomial-column machinery, scaling
      // coordinate i by t^(its own weight).
      std::vector<FilStep> steps;
      for (const auto& st : F.steps()) {
        std::vector<std::vector<PadicPoly>> cols;
        for (int j = 0; j < st.basis.cols(); ++j) {
          std::vector<PadicPoly> col;
          for (int i = 0; i < n; ++i) {
            PadicPoly entry(5, {st.basis.at(i, j)});
            col.push_back(entry.shifted_var(static_cast<int>(ws[i])));
          }
          cols.push_back(std::move(col));
        }
        steps.push_back(FilStep{st.jump, grassmann_limit(std::move(cols), false)});
      }
      FilteredSpace direct(5, n, std::move(steps));
      for (size_t s = 0; s < via_ps.steps().size(); ++s)
        if (!same_span(via_ps.steps()[s].basis, direct.steps()[s].basis))
          c.fail("case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("25 shared instances"));
  }
  {
    Checker c("sl2-bracket-relations");
    std::vector<std::vector<int>> partitions = {{2}, {2, 1}, {3}, {2, 2}, {3, 1}, {4},
                                                {3, 2}, {4, 1}, {5}};
    for (const auto& part : partitions) {
      int n = 0;
      for (int b : part) n += b;
      PMat m(3, n, n);
      int off = 0;
      for (int b : part) {
        for (int i = 0; i + 1 < b; ++i) m.at(off + i, off + i + 1) = PadicScalar::one(3);
        off += b;
      }
      PMat g = unimodular(3, n, rng);
      PMat ginv = solve_in_span(g, PMat::identity(3, n));
      try {
        auto triple = jacobson_morozov(NilpotentOperator(g * m * ginv));
        PadicScalar tr = PadicScalar::zero(3);
        for (int i = 0; i < n; ++i) tr = tr + triple.semisimple.at(i, i);
        if (!tr.is_zero_at_precision()) c.fail("trace H != 0");
      } catch (const Error& e) {
        c.fail(std::string("bracket failure: ") + e.what());
      }
    }
    report.lines.push_back(c.done("all Jordan types, dims <= 5"));
  }
  {
    Checker c("weight-filtration-axioms");
    for (int m = 2; m <= 5; ++m) {
      PMat mat(3, m, m);
      for (int i = 0; i + 1 < m; ++i) mat.at(i, i + 1) = PadicScalar::one(3);
      try {
        auto M = monodromy_weight_filtration(NilpotentOperator(mat));
        if (static_cast<int>(M.steps.size()) != m) c.fail("step count, block " + std::to_string(m));
        for (int i = 0; i < static_cast<int>(M.steps.size()); ++i)
          if (M.steps[i].index != -(m - 1) + 2 * i)
            c.fail("jump set, block " + std::to_string(m));
      } catch (const Error& e) {
        c.fail(std::string("axioms: ") + e.what());
      }
    }
    report.lines.push_back(c.done("single Jordan blocks, sizes 2..5"));
  }
  {
    Checker c("conjugation-limit-commutant");
    for (int iter = 0; iter < 40; ++iter) {
      auto N = random_nilpotent(5, 3, rng);
      auto g = PMat::identity(5, 3) + N.matrix().scaled(PadicScalar::from_int(5, 2));
      auto res = conjugation_limit(N, g);
      if (!res.converged) continue;
      PMat comm = N.matrix() * res.value - res.value * N.matrix();
      if (!comm.is_zero_at_precision()) c.fail("case " + std::to_string(iter));
    }
    report.lines.push_back(c.done("40 commuting instances"));
  }
  return report;
}

VerifyReport fourier_suite(unsigned long seed) {
  VerifyReport report{"fourier", {}};
  std::mt19937_64 rng(seed + 53);
  {
    Checker c("pairing-identity-list");
    std::uniform_int_distribution<long> small(-4, 4);
    for (int iter = 0; iter < 10; ++iter) {
      const int p = 5;
      std::vector<Rat> fc, gc;
      for (int i = 0; i < 4; ++i) fc.emplace_back(small(rng));
      for (int i = 0; i < 3; ++i) gc.emplace_back(small(rng));
      RatPoly fq(gc);
      auto F = PadicPoly::from_rationals(p, fc);
      auto f = mahler_expand(fq, p);
      auto z = PadicScalar::from_int(p, 5);
      // {1, f} = f(0)
      auto one_poly = PadicPoly::from_rationals(p, {Rat(1)});
      if (!PadicScalar::agree(amice_pairing(one_poly, f),
                              PadicScalar::from_rational(p, fq.eval(Rat(0)))))
        c.fail("{1,f} at case " + std::to_string(iter));
      // {F, kappa_w} = F(w)
      auto w = PadicScalar::from_int(p, 10);
      if (!PadicScalar::agree(amice_pairing(F, MahlerSeries::character(w, 24)), F.eval(w)))
        c.fail("{F,kappa} at case " + std::to_string(iter));
      // {z^m, f} = c_m
      for (int m = 0; m <= 2; ++m) {
        std::vector<Rat> mono(static_cast<size_t>(m) + 1, Rat(0));
        mono.back() = Rat(1);
        if (!PadicScalar::agree(
                amice_pairing(PadicPoly::from_rationals(p, mono), f), f.coeff(m)))
          c.fail("orthogonality at case " + std::to_string(iter));
      }
      // {F, kappa_z f} = {F(z + .), f} along the disc group law.
      std::vector<PadicScalar> values;
      {
        PadicScalar acc = PadicScalar::one(p);
        for (long k = 0; k <= F.degree(); ++k) {
          values.push_back(acc * PadicScalar::from_rational(p, fq.eval(Rat(k))));
          acc = acc * PadicScalar::from_int(p, 6);
        }
      }
      std::vector<PadicScalar> diffs;
      for (int n = 0; n <= F.degree(); ++n) {
        diffs.push_back(values[0]);
        for (size_t k = 0; k + 1 < values.size(); ++k) values[k] = values[k + 1] - values[k];
        values.pop_back();
      }
      PadicScalar lhs = PadicScalar::zero(p);
      for (int n = 0; n <= F.degree(); ++n) lhs = lhs + F.coeff(n) * diffs[static_cast<size_t>(n)];
      PadicPoly shift(p, {z, PadicScalar::one(p) + z});
      PadicPoly composed(p);
      for (int i = F.degree(); i >= 0; --i)
        composed = composed * shift + PadicPoly::constant(F.coeff(i));
      if (!PadicScalar::agree(lhs, amice_pairing(composed, f)))
        c.fail("recentering at case " + std::to_string(iter));
      // {F, f(a.)} = {F o [a], f}
      for (long a : {2L, 3L}) {
        std::vector<Rat> scaled(gc);
        Rat apow(1);
        for (size_t i = 0; i < scaled.size(); ++i) {
          scaled[i] *= apow;
          apow *= Rat(a);
        }
        auto lhs2 = amice_pairing(F, mahler_expand(RatPoly(scaled), p));
        std::vector<Rat> az(static_cast<size_t>(a) + 1, Rat(0));
        mpz_class binom(1);
        for (long k = 0; k <= a; ++k) {
          az[static_cast<size_t>(k)] = Rat(binom);
          binom = binom * (a - k) / (k + 1);
        }
        az[0] -= 1;
        PadicPoly bracket = PadicPoly::from_rationals(p, az);
        PadicPoly comp(p);
        for (int i = F.degree(); i >= 0; --i)
          comp = comp * bracket + PadicPoly::constant(F.coeff(i));
        if (!PadicScalar::agree(lhs2, amice_pairing(comp, f)))
          c.fail("[a]-compat at case " + std::to_string(iter));
      }
    }
    report.lines.push_back(c.done("10 random instances, all identities"));
  }
  {
    Checker c("character-homomorphism");
    std::uniform_int_distribution<long> small(-30, 30);
    int cases = 0;
    for (int p : {2, 3, 5}) {
      CharacterPoint pt(PadicScalar::from_int(p, 2 * p));
      for (int iter = 0; iter < 25; ++iter) {
        auto x = PadicScalar::from_int(p, small(rng));
        auto y = PadicScalar::from_int(p, small(rng));
        ++cases;
        if (!PadicScalar::agree(eval_character(pt, x + y),
                                eval_character(pt, x) * eval_character(pt, y)))
          c.fail("p=" + std::to_string(p));
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases"));
  }
  {
    Checker c("monoid-compatibility");
    std::uniform_int_distribution<long> small(1, 12);
    int cases = 0;
    for (int p : {2, 3, 5}) {
      auto z = PadicScalar::from_int(p, p);
      for (int iter = 0; iter < 10; ++iter) {
        long a = small(rng), x = small(rng);
        auto az = monoid_action(PadicScalar::from_int(p, a), z);
        ++cases;
        if (!PadicScalar::agree(
                eval_character(CharacterPoint(az), PadicScalar::from_int(p, x)),
                eval_character(CharacterPoint(z), PadicScalar::from_int(p, a * x))))
          c.fail("p=" + std::to_string(p) + " a=" + std::to_string(a));
      }
    }
    report.lines.push_back(c.done(std::to_string(cases) + " cases"));
  }
  {
    Checker c("mahler-round-trip");
    std::uniform_int_distribution<long> small(-6, 6);
    for (int p : {2, 3, 5}) {
      for (int deg = 0; deg <= 10; ++deg) {
        std::vector<Rat> cs;
        for (int i = 0; i <= deg; ++i) cs.emplace_back(small(rng));
        RatPoly f(cs);
        auto series = mahler_expand(f, p);
        for (long x = 0; x <= 11; ++x) {
          if (!PadicScalar::agree(mahler_eval(series, PadicScalar::from_int(p, x)),
                                  PadicScalar::from_rational(p, f.eval(Rat(x)))))
            c.fail("p=" + std::to_string(p) + " deg=" + std::to_string(deg));
        }
      }
    }
    report.lines.push_back(c.done("degrees <= 10, exact"));
  }
  {
    Checker c("eq75-inequality");
    for (int p : {2, 3, 5}) {
      std::vector<RatPoly> polys;
      polys.push_back(RatPoly::constant(Rat(1)));
      for (int l = 1; l <= 20; ++l) {
        RatPoly next = polys.back() * RatPoly({Rat(1 - l), Rat(1)});
        polys.push_back(next.scaled(Rat(1, l)));
      }
      Rat omega(1, p - 1);
      for (Int n = 0; n <= 20; ++n) {
        Rat plain_min;
        bool any = false;
        for (Int i = 0; i <= n; ++i) {
          auto v = gauss_norm_val(polys[static_cast<size_t>(i)], p, Rat(0), n, Rat(0));
          if (!v) continue;
          if (!any || *v < plain_min) {
            plain_min = *v;
            any = true;
          }
        }
        for (Int l = 0; l <= n; ++l) {
          auto v = gauss_norm_val(polys[static_cast<size_t>(l)], p, Rat(0), n, omega);
          if (v && any && *v < plain_min)
            c.fail("p=" + std::to_string(p) + " l=" + std::to_string(l) + " n=" +
                   std::to_string(n));
        }
      }
    }
    report.lines.push_back(c.done("p=2,3,5; l,n \u2264 20"));
  }
  {
    Checker c("decay-envelope");
    for (int p : {2, 3, 5}) {
      Rat omega(1, p - 1);
      std::vector<RatPoly> polys;
      polys.push_back(RatPoly::constant(Rat(1)));
      for (int l = 1; l < 256; ++l) {
        RatPoly next = polys.back() * RatPoly({Rat(1 - l), Rat(1)});
        polys.push_back(next.scaled(Rat(1, l)));
      }
      for (Int n = 1; n <= 4; ++n) {
        Rat prev_max;
        bool first = true;
        for (int L : {16, 32, 64, 128}) {
          Rat block_max;
          bool any = false;
          for (int l = L; l < 2 * L; ++l) {
            auto v = gauss_norm_val(polys[static_cast<size_t>(l)], p, Rat(0), n, omega);
            if (!any || *v > block_max) {
              block_max = *v;
              any = true;
            }
          }
          if (!first && block_max > prev_max)
            c.fail("p=" + std::to_string(p) + " n=" + std::to_string(n) + " L=" +
                   std::to_string(L));
          prev_max = block_max;
          first = false;
        }
      }
    }
    report.lines.push_back(c.done("omega=1/(p-1), n=1..4, L=16..128"));
  }
  return report;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"padic", "isocrystal", "filtration", "orbit", "fourier"};
}

VerifyReport verify_suite(const std::string& suite, unsigned long seed) {
  try {
    if (suite == "padic") return padic_suite(seed);
    if (suite == "isocrystal") return isocrystal_suite(seed);
    if (suite == "filtration") return filtration_suite(seed);
    if (suite == "orbit") return orbit_suite(seed);
    if (suite == "fourier") return fourier_suite(seed);
  } catch (const Error& e) {
    VerifyReport r{suite, {}};
    r.lines.push_back(VerifyLine{"suite-aborted", false, "", e.what()});
    return r;
  }
  throw ValidationError("unknown verify suite '" + suite + "'");
}

std::vector<VerifyReport> verify_all(unsigned long seed) {
  std::vector<VerifyReport> out;
  for (const auto& name : verify_suite_names()) out.push_back(verify_suite(name, seed));
  return out;
}

}  // namespace phodge

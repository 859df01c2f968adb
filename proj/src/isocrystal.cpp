#include "phodge/isocrystal.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "phodge/filtration.hpp"

namespace phodge {

NewtonVector NewtonVector::from_slopes(std::vector<Rat> slopes) {
  std::sort(slopes.begin(), slopes.end(), [](const Rat& a, const Rat& b) { return a > b; });
  std::vector<std::pair<Rat, int>> pairs;
  for (const auto& s : slopes) {
    if (!pairs.empty() && pairs.back().first == s)
      ++pairs.back().second;
    else
      pairs.emplace_back(s, 1);
  }
  NewtonVector nu;
  nu.pairs_ = std::move(pairs);
  return nu;
}

NewtonVector NewtonVector::from_pairs(std::vector<std::pair<Rat, int>> pairs) {
  std::vector<Rat> flat;
  for (const auto& [v, m] : pairs) {
    if (m <= 0) throw ValidationError("non-positive multiplicity in Newton vector");
    for (int i = 0; i < m; ++i) flat.push_back(v);
  }
  return from_slopes(std::move(flat));
}

std::vector<Rat> NewtonVector::flat() const {
  std::vector<Rat> out;
  for (const auto& [v, m] : pairs_)
    for (int i = 0; i < m; ++i) out.push_back(v);
  return out;
}

int NewtonVector::total_multiplicity() const {
  int n = 0;
  for (const auto& [v, m] : pairs_) n += m;
  return n;
}

Rat NewtonVector::sum() const {
  Rat s(0);
  for (const auto& [v, m] : pairs_) s += v * Rat(m);
  return s;
}

std::string NewtonVector::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& s : flat()) {
    if (!first) os << ",";
    os << rat_to_string(s);
    first = false;
  }
  return os.str();
}

Isocrystal::Isocrystal(int prime, PMat frobenius)
    : prime_(prime), frobenius_(std::move(frobenius)) {
  if (frobenius_.rows() != frobenius_.cols())
    throw ValidationError("Frobenius matrix must be square");
  if (frobenius_.rows() == 0) throw ValidationError("Frobenius of dimension zero");
  if (frobenius_.prime() != prime_) throw ValidationError("Frobenius prime mismatch");
  if (!det(frobenius_).known_nonzero())
    throw ValidationError("Frobenius is not invertible within tracked precision");
}

Isocrystal simple_isocrystal(int prime, long r, long s, Int rel_prec) {
  if (s <= 0) throw NotCoprime("s must be positive");
  if (std::gcd(std::abs(r), s) != 1) throw NotCoprime("gcd(r, s) must be 1");
  PMat m(prime, static_cast<int>(s), static_cast<int>(s));
  m.at(0, static_cast<int>(s) - 1) = PadicScalar::p_power(prime, r, rel_prec);
  for (int i = 1; i < s; ++i) m.at(i, i - 1) = PadicScalar::one(prime, rel_prec);
  return Isocrystal(prime, m);
}

namespace {

struct HullPoint {
  int x;
  Rat y;
};

// Lower convex hull of points ordered by x (monotone chain).
std::vector<HullPoint> lower_hull(const std::vector<HullPoint>& pts) {
  std::vector<HullPoint> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      // keep if turn at b is convex: (b-a) x (pt-a) >= 0 fails for lower hull
      Rat cross = (b.y - a.y) * Rat(pt.x - a.x) - (pt.y - a.y) * Rat(b.x - a.x);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  return hull;
}

Rat hull_height_at(const std::vector<HullPoint>& hull, int x) {
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    if (x >= hull[i].x && x <= hull[i + 1].x) {
      Rat t(x - hull[i].x, hull[i + 1].x - hull[i].x);
      t.canonicalize();
      return hull[i].y + (hull[i + 1].y - hull[i].y) * t;
    }
  }
  return hull.back().y;
}

// Newton polygon data of a polynomial: certified lower hull of
// (i, val(c_i)); o-zero coefficients must lie on or above the hull.
std::vector<HullPoint> certified_hull(const PadicPoly& f) {
  std::vector<HullPoint> pts;
  for (int i = 0; i <= f.degree(); ++i) {
    const PadicScalar& c = f.coeff(i);
    if (c.known_nonzero()) pts.push_back({i, Rat(static_cast<long>(c.valuation()))});
  }
  if (pts.empty()) throw PrecisionExhausted("no certified coefficients for Newton polygon");
  auto hull = lower_hull(pts);
  for (int i = 0; i <= f.degree(); ++i) {
    const PadicScalar& c = f.coeff(i);
    if (c.known_nonzero() || c.is_exact_zero()) continue;
    if (i < hull.front().x || i > hull.back().x) continue;
    if (Rat(static_cast<long>(c.val_lower_bound())) < hull_height_at(hull, i))
      throw PrecisionExhausted("coefficient valuation indeterminate on the Newton polygon");
  }
  return hull;
}

}  // namespace

NewtonVector newton_polygon(const Isocrystal& E) {
  const int n = E.dim();
  PadicPoly cp = charpoly(E.frobenius());
  // det(1 - Phi t) has coefficient a_k = c_{n-k} of the monic charpoly.
  std::vector<PadicScalar> rev;
  for (int k = 0; k <= n; ++k) rev.push_back(cp.coeff(n - k));
  PadicPoly reverse(E.prime(), std::move(rev));
  auto hull = certified_hull(reverse);
  if (hull.front().x != 0 || hull.back().x != n)
    throw PrecisionExhausted("Newton polygon endpoints not certified");
  std::vector<Rat> slopes;
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    const int len = hull[i + 1].x - hull[i].x;
    Rat s = (hull[i + 1].y - hull[i].y) / Rat(len);
    s.canonicalize();
    for (int k = 0; k < len; ++k) slopes.push_back(s);
  }
  return NewtonVector::from_slopes(std::move(slopes));
}

namespace {

// Gauss valuation min_i (val(c_i) - mu*i), the supporting functional of the
// polygon vertex used to measure Hensel progress.
Rat mu_valuation(const PadicPoly& f, const Rat& mu) {
  Rat best;
  bool any = false;
  for (int i = 0; i <= f.degree(); ++i) {
    const PadicScalar& c = f.coeff(i);
    if (!c.known_nonzero()) continue;
    Rat w = Rat(static_cast<long>(c.valuation())) - mu * Rat(i);
    if (!any || w < best) {
      best = w;
      any = true;
    }
  }
  if (!any) return Rat(static_cast<long>(kValInfinity));
  return best;
}

PadicPoly truncate_degree(const PadicPoly& f, int deg) {
  std::vector<PadicScalar> cs;
  for (int i = 0; i <= deg; ++i) cs.push_back(f.coeff(i));
  for (int i = deg + 1; i <= f.degree(); ++i)
    if (f.coeff(i).known_nonzero())
      throw PrecisionExhausted("certified coefficient beyond expected factor degree");
  return PadicPoly(f.prime(), std::move(cs));
}

// Extended Euclid over polynomials with p-adic coefficients; uncertified
// leading coefficients are stripped as zeros (the final Bezout identity is
// verified by the caller's lift loop).
struct Bezout {
  PadicPoly u, v;  // u*g + v*h = 1 within precision
};

PadicPoly strip_uncertified_lead(PadicPoly f) {
  std::vector<PadicScalar> cs(f.coeffs());
  while (!cs.empty() && !cs.back().known_nonzero()) cs.pop_back();
  return PadicPoly(f.prime(), std::move(cs));
}

Bezout bezout_pair(const PadicPoly& g, const PadicPoly& h) {
  const int p = g.prime();
  PadicPoly r0 = g, r1 = h;
  PadicPoly u0 = PadicPoly::from_rationals(p, {Rat(1)}), u1(p);
  PadicPoly v0(p), v1 = PadicPoly::from_rationals(p, {Rat(1)});
  for (int guard = 0; guard < 256 && !strip_uncertified_lead(r1).is_zero(); ++guard) {
    PadicPoly r1s = strip_uncertified_lead(r1);
    auto [q, r] = PadicPoly::divmod(r0, r1s);
    PadicPoly r2 = strip_uncertified_lead(r);
    r0 = r1s;
    r1 = r2;
    PadicPoly u2 = u0 - q * u1;
    PadicPoly v2 = v0 - q * v1;
    u0 = u1;
    u1 = u2;
    v0 = v1;
    v1 = v2;
  }
  if (r0.degree() != 0 || !r0.coeff(0).known_nonzero())
    throw PrecisionExhausted("factors not separable at tracked precision");
  PadicScalar inv = r0.coeff(0).inverse();
  return Bezout{u0.scaled(inv), v0.scaled(inv)};
}

// Split monic f = g*h at an interior polygon vertex k (g right part monic
// of degree n-k, h left part monic of degree k) by quadratic Hensel
// lifting; mu is a separating slope strictly between the adjacent hull
// slopes.
std::pair<PadicPoly, PadicPoly> hensel_split(const PadicPoly& f, int k, const Rat& mu) {
  const int p = f.prime();
  const int n = f.degree();
  const PadicScalar pivot = f.coeff(k);
  if (!pivot.known_nonzero())
    throw PrecisionExhausted("polygon vertex coefficient uncertified");
  std::vector<PadicScalar> hcs, gcs;
  PadicScalar pinv = pivot.inverse();
  for (int i = 0; i <= k; ++i) hcs.push_back(f.coeff(i) * pinv);
  for (int i = k; i <= n; ++i) gcs.push_back(f.coeff(i));
  PadicPoly h(p, std::move(hcs));  // monic degree k
  PadicPoly g(p, std::move(gcs));  // monic degree n-k

  Int amin = kValInfinity;
  for (int i = 0; i <= n; ++i) amin = std::min(amin, f.coeff(i).abs_precision());
  // Lift as far as the representation allows; the floor below which we fail
  // loudly is half the available precision.
  const Int floor_tau = amin / 2;

  Rat last_progress = mu_valuation(f - g * h, mu);
  for (int iter = 0; iter < 200; ++iter) {
    PadicPoly e = f - g * h;
    if (e.min_coeff_val_bound() >= amin) break;
    Bezout bz = bezout_pair(g, h);
    auto [q, dh] = PadicPoly::divmod(e * bz.u, h);
    PadicPoly dg = e * bz.v + q * g;
    PadicPoly g2 = truncate_degree(g + dg, n - k);
    PadicPoly h2 = truncate_degree(h + dh, k);
    Rat progress = mu_valuation(f - g2 * h2, mu);
    if (progress <= last_progress) break;  // representation exhausted
    g = std::move(g2);
    h = std::move(h2);
    last_progress = progress;
  }
  const Int achieved = (f - g * h).min_coeff_val_bound();
  if (achieved < floor_tau)
    throw PrecisionExhausted("Hensel lifting stalled before half precision");
  // The product is certified mod p^achieved; the factors themselves are
  // pinned mod p^(achieved - kappa), kappa the Bezout denominator valuation
  // (the separation of the polygon segments).
  Bezout bz = bezout_pair(g, h);
  Int kappa = std::min(Int(0), std::min(bz.u.min_coeff_val_bound(),
                                        bz.v.min_coeff_val_bound()));
  const Int bound = achieved + kappa;
  if (bound <= 0)
    throw PrecisionExhausted("factor separation exceeds available precision");
  auto capped = [&](const PadicPoly& poly) {
    std::vector<PadicScalar> cs;
    for (int i = 0; i <= poly.degree(); ++i) cs.push_back(poly.coeff(i).capped(bound));
    return PadicPoly(p, std::move(cs));
  };
  return {capped(truncate_degree(g, n - k)), capped(truncate_degree(h, k))};
}

}  // namespace

std::vector<std::pair<Rat, PadicPoly>> slope_factorization(const PadicPoly& f_in) {
  const int p = f_in.prime();
  if (f_in.degree() < 0) throw ValidationError("zero polynomial");
  PadicScalar lead = f_in.coeff(f_in.degree());
  if (!lead.known_nonzero())
    throw PrecisionExhausted("leading coefficient not certified");
  PadicPoly f = f_in.scaled(lead.inverse());
  if (!f.coeff(0).known_nonzero())
    throw ValidationError("slope factorization requires f(0) != 0");

  std::vector<std::pair<Rat, PadicPoly>> out;
  std::vector<PadicPoly> work{f};
  while (!work.empty()) {
    PadicPoly cur = work.back();
    work.pop_back();
    if (cur.degree() == 0) continue;
    auto hull = certified_hull(cur);
    if (hull.size() <= 2) {
      Rat s = (hull.back().y - hull.front().y) / Rat(cur.degree());
      s.canonicalize();
      out.emplace_back(-s, cur);  // root valuation = -hull slope for monic f
      continue;
    }
    const int k = hull[1].x;
    Rat s_left = (hull[1].y - hull[0].y) / Rat(hull[1].x - hull[0].x);
    Rat s_right = (hull[2].y - hull[1].y) / Rat(hull[2].x - hull[1].x);
    Rat mu = (s_left + s_right) / 2;
    auto [g, h] = hensel_split(cur, k, mu);
    work.push_back(g);
    work.push_back(h);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

std::vector<SlopePart> slope_decomposition(const Isocrystal& E) {
  PadicPoly cp = charpoly(E.frobenius());
  auto factors = slope_factorization(cp);
  std::vector<SlopePart> parts;
  for (const auto& [slope, factor] : factors) {
    // Evaluate the factor on Frobenius and take its kernel.
    const int n = E.dim();
    PMat acc(E.prime(), n, n);
    PMat power = PMat::identity(E.prime(), n);
    for (int i = 0; i <= factor.degree(); ++i) {
      acc = acc + power.scaled(factor.coeff(i));
      if (i < factor.degree()) power = power * E.frobenius();
    }
    PMat part = kernel(acc, factor.degree());
    if (!contains_span(part, E.frobenius() * part))
      throw PrecisionExhausted("slope part not Frobenius-stable at tracked precision");
    parts.push_back(SlopePart{slope, part});
  }
  int total = 0;
  for (const auto& part : parts) total += part.basis.cols();
  if (total != E.dim())
    throw PrecisionExhausted("slope parts do not fill the space");
  return parts;
}

bool newton_leq(const NewtonVector& lhs, const NewtonVector& rhs) {
  auto a = lhs.flat();
  auto b = rhs.flat();
  if (a.size() != b.size())
    throw DimensionMismatch("Newton vectors of different total multiplicity");
  Rat pa(0), pb(0);
  for (size_t i = 0; i < a.size(); ++i) {
    pa += a[i];
    pb += b[i];
    if (i + 1 < a.size()) {
      if (pa > pb) return false;
    } else {
      if (pa != pb) return false;
    }
  }
  return true;
}

bool is_admissible_newton(const NewtonVector& nu) {
  for (const auto& [v, m] : nu.pairs()) {
    Rat t = v * Rat(m);
    t.canonicalize();
    if (t.get_den() != 1) return false;
  }
  return true;
}

long siegel_stratum_dimension(const NewtonVector& nu, int g) {
  auto flat = nu.flat();
  if (static_cast<int>(flat.size()) != 2 * g)
    throw NotPolarized("Newton vector must have 2g entries");
  for (int i = 0; i < g; ++i)
    if (flat[i] + flat[2 * g - i - 1] != 1)
      throw NotPolarized("entries must pair to 1");
  for (const auto& v : flat)
    if (v < 0 || v > 1) throw NotPolarized("entries must lie in [0,1]");
  long count = 0;
  Rat partial(0);
  // i = 0 contributes nothing (j < 0 impossible); walk i = 1..g.
  for (int i = 1; i <= g; ++i) {
    partial += flat[2 * g - i];  // nu_{2g-l+1} for l = i
    const long lo = rat_ceil(partial);
    if (lo < i) count += i - lo;
  }
  return count;
}

FilteredSpace slope_filtration(const Isocrystal& E) {
  auto parts = slope_decomposition(E);
  // Parts arrive by decreasing slope; F^{-lambda} accumulates slopes <= lambda,
  // so walk from the smallest slope upward.
  std::vector<FilStep> steps;
  PMat acc(E.prime(), E.dim(), 0);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    acc = acc.cols() ? sum_spans(acc, it->basis) : canonical_image(it->basis);
    steps.push_back(FilStep{-it->slope, acc});
  }
  return FilteredSpace(E.prime(), E.dim(), std::move(steps));
}

}  // namespace phodge

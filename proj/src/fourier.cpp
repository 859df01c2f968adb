#include "phodge/fourier.hpp"

#include <algorithm>

namespace phodge {

CharacterPoint::CharacterPoint(PadicScalar z) : z_(std::move(z)) {
  if (!z_.is_exact_zero() && z_.val_lower_bound() < 1)
    throw OutOfDisc("character point needs val(z) >= 1");
}

MahlerSeries::MahlerSeries(int prime, std::vector<PadicScalar> coeffs, Rat omega_val,
                           Int radius_exponent, bool finite)
    : prime_(prime), coeffs_(std::move(coeffs)), omega_(std::move(omega_val)),
      radius_(radius_exponent), finite_(finite) {
  for (const auto& c : coeffs_)
    if (c.prime() != prime_) throw ValidationError("mixed primes in Mahler series");
}

MahlerSeries MahlerSeries::finite_series(int prime, std::vector<PadicScalar> coeffs,
                                         Rat omega_val) {
  return MahlerSeries(prime, std::move(coeffs), std::move(omega_val), 0, true);
}

MahlerSeries MahlerSeries::character(const PadicScalar& w, int stored) {
  const int p = w.prime();
  if (!w.is_exact_zero() && w.val_lower_bound() < 1)
    throw OutOfDisc("character coefficients need val(w) >= 1");
  std::vector<PadicScalar> cs;
  PadicScalar power = PadicScalar::one(p);
  for (int n = 0; n <= stored; ++n) {
    cs.push_back(power);
    power = power * w;
  }
  MahlerSeries s(p, std::move(cs), Rat(0), 1, false);
  const Int vw = w.is_exact_zero() ? kValInfinity / 2 : w.val_lower_bound();
  return with_decay(std::move(s), Rat(0), Rat(static_cast<long>(vw)));
}

MahlerSeries with_decay(MahlerSeries s, Rat alpha, Rat beta) {
  s.decay_ = std::make_pair(std::move(alpha), std::move(beta));
  return s;
}

PadicScalar MahlerSeries::coeff(int n) const {
  if (n < static_cast<int>(coeffs_.size())) return coeffs_[static_cast<size_t>(n)];
  if (finite_) return PadicScalar::zero(prime_);
  auto bound = tail_val_bound(n);
  if (!bound) throw Divergent("no certificate for unstored Mahler coefficient");
  return PadicScalar::o_zero(prime_, *bound);
}

std::optional<Int> MahlerSeries::tail_val_bound(int n) const {
  if (finite_) return kValInfinity;
  if (!decay_) return std::nullopt;
  Rat bound = decay_->first + decay_->second * Rat(n);
  return rat_floor(bound);
}

PadicScalar eval_character(const CharacterPoint& pt, const PadicScalar& x) {
  const int p = pt.prime();
  if (!x.is_exact_zero() && x.val_lower_bound() < 0)
    throw OutOfDomain("character argument must lie in Z_p");
  const PadicScalar& z = pt.z();
  if (z.is_exact_zero() || x.is_exact_zero()) {
    if (x.is_exact_zero()) return PadicScalar::one(p);
    if (z.is_exact_zero()) return PadicScalar::one(p);
  }
  const Int vz = z.val_lower_bound();
  Int target = std::min(z.abs_precision(),
                        x.is_exact_zero() ? kValInfinity : x.abs_precision());
  if (target == kValInfinity) target = kDefaultRelPrec;
  // Terms binom(x,n) z^n; binom(x,n) lies in Z_p, so the term valuation is
  // at least n*vz - val_p(n!) >= n*(vz - 1/(p-1)) + small: increasing on the
  // disc.  Stop at the first certified bound past the target.
  PadicScalar sum = PadicScalar::one(p);
  PadicScalar binom = PadicScalar::one(p);
  PadicScalar zpow = PadicScalar::one(p);
  Int n = 1;
  Int tail = 0;
  for (;;) {
    tail = n * vz - (n - 1) / (p - 1);
    if (tail >= target) break;
    binom = binom * (x - PadicScalar::from_int(p, n - 1)) / PadicScalar::from_int(p, n);
    zpow = zpow * z;
    PadicScalar term = binom * zpow;
    if (term.known_nonzero() || !term.is_exact_zero()) sum = sum + term;
    if (binom.is_exact_zero()) {
      tail = kValInfinity;
      break;  // integer x: the series terminates exactly
    }
    ++n;
    if (n > 64 * 8 + 16) break;
  }
  return sum.capped(std::min(target, tail));
}

PadicScalar monoid_action(const PadicScalar& a, const PadicScalar& z) {
  if (a.is_exact_zero()) throw ValidationError("monoid action needs a != 0");
  CharacterPoint pt(z);
  return eval_character(pt, a) - PadicScalar::one(z.prime());
}

namespace {

PadicScalar pairing_impl(const PadicPoly& F, Int F_tail_bound, const MahlerSeries& f) {
  const int p = F.prime();
  PadicScalar acc = PadicScalar::zero(p);
  const int stored = static_cast<int>(f.coeffs().size());
  for (int n = 0; n <= F.degree(); ++n) {
    const PadicScalar a = F.coeff(n);
    if (a.is_exact_zero()) continue;
    if (n >= stored && !f.finite()) {
      auto bound = f.tail_val_bound(n);
      if (!bound) throw Divergent("Mahler certificate does not cover the series");
      acc = acc + PadicScalar::o_zero(p, a.val_lower_bound() + *bound);
      continue;
    }
    acc = acc + a * f.coeff(n);
  }
  // Tail of a truncated series pairs against coefficients we must bound.
  if (F_tail_bound < kValInfinity) {
    if (f.finite()) {
      // Only finitely many c_n are nonzero; the omitted a_n (val >= bound)
      // hit them with valuation at least F_tail_bound + min val(c_n).
      Int cmin = 0;
      for (const auto& c : f.coeffs())
        if (!c.is_exact_zero()) cmin = std::min(cmin, c.val_lower_bound());
      acc = acc + PadicScalar::o_zero(p, F_tail_bound + cmin);
    } else {
      auto bound = f.tail_val_bound(F.degree() + 1);
      if (!bound || *bound + F_tail_bound < 0)
        throw Divergent("pairing tail cannot be certified");
      Int cmin = *bound;
      for (const auto& c : f.coeffs())
        if (!c.is_exact_zero()) cmin = std::min(cmin, c.val_lower_bound());
      acc = acc + PadicScalar::o_zero(p, F_tail_bound + cmin);
    }
  }
  return acc;
}

}  // namespace

PadicScalar amice_pairing(const PadicPoly& F, const MahlerSeries& f) {
  return pairing_impl(F, kValInfinity, f);
}

PadicScalar amice_pairing(const TruncatedSeries& F, const MahlerSeries& f) {
  return pairing_impl(F.poly, F.tail_bound, f);
}

MahlerSeries mahler_expand(const RatPoly& f, int prime, Int rel_prec) {
  // Exact forward differences: c_n = (Delta^n f)(0), zero beyond deg f.
  const int d = std::max(f.degree(), 0);
  std::vector<Rat> values;
  for (int k = 0; k <= d; ++k) values.push_back(f.eval(Rat(k)));
  std::vector<PadicScalar> coeffs;
  for (int n = 0; n <= d; ++n) {
    coeffs.push_back(PadicScalar::from_rational(prime, values[0], rel_prec));
    for (size_t k = 0; k + 1 < values.size(); ++k) values[k] = values[k + 1] - values[k];
    values.pop_back();
  }
  return MahlerSeries::finite_series(prime, std::move(coeffs));
}

PadicScalar mahler_eval(const MahlerSeries& f, const PadicScalar& x) {
  if (!f.finite()) throw Divergent("evaluation requires a finite Mahler series");
  const int p = f.prime();
  PadicScalar acc = PadicScalar::zero(p);
  PadicScalar binom = PadicScalar::one(p);
  for (size_t n = 0; n < f.coeffs().size(); ++n) {
    if (n > 0)
      binom = binom * (x - PadicScalar::from_int(p, static_cast<long>(n) - 1)) /
              PadicScalar::from_int(p, static_cast<long>(n));
    acc = acc + f.coeffs()[n] * binom;
  }
  return acc;
}

EstimateReport estimate_report(int prime, int l_max, Int n_max, const Rat& omega) {
  if (l_max > 4096 || n_max > 4096) throw ValidationError("estimate caps exceeded");
  EstimateReport report;
  report.prime = prime;
  report.omega = omega;
  std::vector<RatPoly> polys;
  for (int l = 0; l <= l_max; ++l) polys.push_back(binomial_poly(l));
  // Rows: valuation of P_l(y Omega) under ||.||_{0,n}.
  for (int l = 0; l <= l_max; ++l) {
    for (Int n = 0; n <= n_max; ++n) {
      auto v = gauss_norm_val(polys[l], prime, Rat(0), n, omega);
      report.rows.push_back(EstimateRow{l, n, v ? *v : Rat(0)});
    }
  }
  // Comparison bound: for l <= n, the scaled norm never exceeds the plain
  // maximum over P_0..P_n (valuations: scaled >= min over plain).
  for (Int n = 0; n <= n_max; ++n) {
    Rat plain_min;
    bool any = false;
    for (int i = 0; i <= std::min<Int>(n, l_max); ++i) {
      auto v = gauss_norm_val(polys[i], prime, Rat(0), n, Rat(0));
      if (!v) continue;
      if (!any || *v < plain_min) {
        plain_min = *v;
        any = true;
      }
    }
    for (int l = 0; l <= std::min<Int>(n, l_max); ++l) {
      auto v = gauss_norm_val(polys[l], prime, Rat(0), n, omega);
      if (!v) continue;
      if (any && *v < plain_min) report.bound_holds = false;
    }
  }
  // Per-n least-squares slope of the valuation as a function of l.
  for (Int n = 1; n <= n_max; ++n) {
    Rat sx(0), sy(0), sxx(0), sxy(0);
    long count = 0;
    for (int l = 1; l <= l_max; ++l) {
      auto v = gauss_norm_val(polys[l], prime, Rat(0), n, omega);
      if (!v) continue;
      Rat x(l);
      sx += x;
      sy += *v;
      sxx += x * x;
      sxy += x * *v;
      ++count;
    }
    if (count >= 2) {
      Rat cnt(count);
      Rat denom = cnt * sxx - sx * sx;
      if (denom != 0) {
        Rat slope = (cnt * sxy - sx * sy) / denom;
        slope.canonicalize();
        report.decay_fit.emplace_back(n, slope);
      }
    }
  }
  return report;
}

}  // namespace phodge

#include "phodge/filtration.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace phodge {

FilteredSpace::FilteredSpace(int prime, int ambient_dim, std::vector<FilStep> steps)
    : prime_(prime), ambient_dim_(ambient_dim), steps_(std::move(steps)) {
  if (steps_.empty()) throw ValidationError("filtration needs at least one step");
  int prev_dim = 0;
  for (size_t i = 0; i < steps_.size(); ++i) {
    auto& st = steps_[i];
    if (st.basis.rows() != ambient_dim_)
      throw ShapeMismatch("step basis rows do not match ambient dimension");
    st.basis = canonical_image(st.basis);
    const int d = st.basis.cols();
    if (d <= prev_dim && !(i == 0 && d == 0))
      throw ValidationError("step dimensions must strictly increase");
    if (phodge::rank(st.basis) != d)
      throw RankDeficient("step basis is not independent at tracked precision");
    if (i > 0) {
      if (!(steps_[i - 1].jump > st.jump))
        throw ValidationError("jump indices must strictly decrease");
      if (!contains_span(st.basis, steps_[i - 1].basis))
        throw ValidationError("filtration steps must be nested");
    }
    prev_dim = d;
  }
  if (steps_.front().basis.cols() == 0)
    throw ValidationError("leading step must be a nonzero subspace");
}

FilteredSpace FilteredSpace::trivial(int prime, int dim, const Rat& jump) {
  return FilteredSpace(prime, dim, {FilStep{jump, PMat::identity(prime, dim)}});
}

int FilteredSpace::rank() const { return steps_.back().basis.cols(); }

PMat FilteredSpace::space_at_least(const Rat& x) const {
  const FilStep* best = nullptr;
  for (const auto& st : steps_)
    if (st.jump >= x) best = &st;  // steps descend in jump, grow in size
  if (!best) return PMat(prime_, ambient_dim_, 0);
  return best->basis;
}

PMat FilteredSpace::space_above(const Rat& x) const {
  const FilStep* best = nullptr;
  for (const auto& st : steps_)
    if (st.jump > x) best = &st;
  if (!best) return PMat(prime_, ambient_dim_, 0);
  return best->basis;
}

std::vector<std::pair<Rat, int>> FilteredSpace::graded_dims() const {
  std::vector<std::pair<Rat, int>> out;
  int prev = 0;
  for (const auto& st : steps_) {
    out.emplace_back(st.jump, st.basis.cols() - prev);
    prev = st.basis.cols();
  }
  return out;
}

std::string FilteredSpace::to_string() const {
  std::ostringstream os;
  for (const auto& st : steps_) {
    os << "F^" << rat_to_string(st.jump) << ": dim " << st.basis.cols() << "\n";
  }
  return os.str();
}

OneParamSubgroup::OneParamSubgroup(std::vector<Int> weights, PMat frame)
    : weights_(std::move(weights)), frame_(std::move(frame)) {
  if (static_cast<int>(weights_.size()) != frame_.cols())
    throw ShapeMismatch("weight count must match frame columns");
  if (rank(frame_) != frame_.cols() || frame_.rows() != frame_.cols())
    throw RankDeficient("frame must be invertible");
  // Sort weights non-increasing, permuting the frame alongside.
  std::vector<int> idx(weights_.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return weights_[a] > weights_[b]; });
  PMat sorted(frame_.prime(), frame_.rows(), frame_.cols());
  std::vector<Int> ws(weights_.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    ws[k] = weights_[idx[k]];
    for (int r = 0; r < frame_.rows(); ++r)
      sorted.at(r, static_cast<int>(k)) = frame_.at(r, idx[k]);
  }
  weights_ = std::move(ws);
  frame_ = std::move(sorted);
}

OneParamSubgroup OneParamSubgroup::diagonal(int prime, std::vector<Int> weights,
                                            Int rel_prec) {
  const int n = static_cast<int>(weights.size());
  return OneParamSubgroup(std::move(weights), PMat::identity(prime, n, rel_prec));
}

Rat OneParamSubgroup::average_weight() const {
  Rat s(0);
  for (Int w : weights_) s += Rat(static_cast<long>(w));
  return s / Rat(static_cast<long>(weights_.size()));
}

std::pair<Rat, Rat> degree_and_slope(const FilteredSpace& F) {
  Rat deg(0);
  for (const auto& [jump, d] : F.graded_dims()) deg += jump * Rat(d);
  Rat mu = deg / Rat(F.rank());
  deg.canonicalize();
  mu.canonicalize();
  return {deg, mu};
}

FilteredSpace induced_filtration(const FilteredSpace& F, const PMat& W_in) {
  PMat W = canonical_image(W_in);
  if (W.rows() != F.ambient_dim()) throw ShapeMismatch("subspace rows mismatch");
  if (rank(W) != W.cols()) throw RankDeficient("subspace basis not independent");
  if (W.cols() == 0) throw ValidationError("induced filtration on the zero space");
  std::vector<FilStep> steps;
  int prev_dim = 0;
  for (const auto& st : F.steps()) {
    PMat inter = intersect_spans(st.basis, W);
    if (inter.cols() > prev_dim) {
      steps.push_back(FilStep{st.jump, inter});
      prev_dim = inter.cols();
    }
  }
  if (steps.empty() || steps.back().basis.cols() < W.cols())
    throw ValidationError("filtration support does not reach the subspace");
  return FilteredSpace(F.prime(), F.ambient_dim(), std::move(steps));
}

namespace {

PMat annihilator(const PMat& W, int ambient_dim, int prime) {
  if (W.cols() == 0) return PMat::identity(prime, ambient_dim);
  return kernel(W.transpose(), ambient_dim - W.cols());
}

}  // namespace

FilteredSpace dual_filtration(const FilteredSpace& F) {
  if (!F.full_support())
    throw ValidationError("dual filtration needs full support");
  const int n = F.ambient_dim();
  const int p = F.prime();
  const auto& steps = F.steps();
  std::vector<FilStep> out;
  // (F*)^{-x_i} = annihilator of the part strictly above x_i.
  for (size_t i = steps.size(); i-- > 0;) {
    PMat above = (i == 0) ? PMat(p, n, 0) : steps[i - 1].basis;
    out.push_back(FilStep{-steps[i].jump, annihilator(above, n, p)});
  }
  return FilteredSpace(p, n, std::move(out));
}

FilteredSpace tensor_filtration(const FilteredSpace& F, const FilteredSpace& G) {
  if (F.prime() != G.prime()) throw ValidationError("tensor over mixed primes");
  if (!F.full_support() || !G.full_support())
    throw ValidationError("tensor filtration needs full supports");
  const int p = F.prime();
  const int n = F.ambient_dim() * G.ambient_dim();
  std::set<Rat> jumps;
  for (const auto& a : F.steps())
    for (const auto& b : G.steps()) jumps.insert(a.jump + b.jump);
  std::vector<FilStep> out;
  int prev_dim = 0;
  for (auto it = jumps.rbegin(); it != jumps.rend(); ++it) {
    PMat acc(p, n, 0);
    for (const auto& a : F.steps())
      for (const auto& b : G.steps()) {
        if (a.jump + b.jump >= *it) {
          PMat prod = a.basis.kron(b.basis);
          acc = acc.cols() ? sum_spans(acc, prod) : canonical_image(prod);
        }
      }
    if (acc.cols() > prev_dim) {
      out.push_back(FilStep{*it, acc});
      prev_dim = acc.cols();
    }
  }
  return FilteredSpace(p, n, std::move(out));
}

FilteredSpace derived_constructions(const FilteredSpace& F, const FilteredSpace* G,
                                    const std::string& kind) {
  if (kind == "dual") return dual_filtration(F);
  if (kind == "tensor") {
    if (!G) throw ValidationError("tensor needs a second filtration");
    return tensor_filtration(F, *G);
  }
  throw ValidationError("unknown derived construction '" + kind + "'");
}

Rat filtration_pairing(const FilteredSpace& F1, const FilteredSpace& F2) {
  if (F1.ambient_dim() != F2.ambient_dim())
    throw DimensionMismatch("pairing requires equal ambient dimensions");
  if (F1.prime() != F2.prime()) throw ValidationError("pairing over mixed primes");
  if (!F1.full_support() || !F2.full_support())
    throw ValidationError("pairing requires full supports");
  Rat total(0);
  for (const auto& s1 : F1.steps()) {
    if (s1.jump == 0) continue;
    for (const auto& s2 : F2.steps()) {
      if (s2.jump == 0) continue;
      // dim gr1^x gr2^y via the four-intersection formula.
      PMat a = s1.basis;
      PMat a_up = F1.space_above(s1.jump);
      PMat b = s2.basis;
      PMat b_up = F2.space_above(s2.jump);
      long d = intersect_spans(a, b).cols() - intersect_spans(a_up, b).cols() -
               intersect_spans(a, b_up).cols() + intersect_spans(a_up, b_up).cols();
      if (d != 0) total += s1.jump * s2.jump * Rat(d);
    }
  }
  total.canonicalize();
  return total;
}

FilteredSpace filtration_from_1ps(const OneParamSubgroup& lambda) {
  const int p = lambda.prime();
  const int n = lambda.dim();
  std::vector<FilStep> steps;
  const auto& ws = lambda.weights();
  for (size_t i = 0; i < ws.size(); ++i) {
    if (i + 1 < ws.size() && ws[i + 1] == ws[i]) continue;
    steps.push_back(FilStep{Rat(static_cast<long>(ws[i])),
                            lambda.frame().col_range(0, static_cast<int>(i) + 1)});
  }
  return FilteredSpace(p, n, std::move(steps));
}

FilteredSpace ps_limit(const OneParamSubgroup& lambda, const FilteredSpace& F,
                       bool to_zero) {
  const int p = lambda.prime();
  const int n = lambda.dim();
  if (F.ambient_dim() != n) throw DimensionMismatch("ps_limit dimension mismatch");
  // Work in frame coordinates; row i scales by t^(w_i - wmin).
  const auto& ws = lambda.weights();
  Int wmin = ws.empty() ? 0 : *std::min_element(ws.begin(), ws.end());
  std::vector<FilStep> out;
  for (const auto& st : F.steps()) {
    PMat coords = solve_in_span(lambda.frame(), st.basis);
    std::vector<std::vector<PadicPoly>> cols;
    for (int j = 0; j < coords.cols(); ++j) {
      std::vector<PadicPoly> col;
      for (int i = 0; i < n; ++i) {
        PadicPoly entry(p, {coords.at(i, j)});
        col.push_back(entry.shifted_var(static_cast<int>(ws[i] - wmin)));
      }
      cols.push_back(std::move(col));
    }
    // t -> 0 keeps the lowest weight component of each direction.
    PMat limit_coords = grassmann_limit(std::move(cols), !to_zero);
    out.push_back(FilStep{st.jump, canonical_image(lambda.frame() * limit_coords)});
  }
  return FilteredSpace(p, n, std::move(out));
}

namespace {

// Roots of a single-slope factor over Q_p when the slope is an integer and
// the unit polynomial is separable mod p: Hensel-liftable eigenvalues.
std::vector<PadicScalar> split_isoclinic_factor(const PadicPoly& f, const Rat& slope) {
  const int p = f.prime();
  std::vector<PadicScalar> roots;
  if (slope.get_den() != 1) return roots;
  const long m = slope.get_num().get_si();
  const int d = f.degree();
  if (d == 1) {
    roots.push_back(-f.coeff(0));
    return roots;
  }
  // g(u) = f(p^m u) / p^(m d) is a unit polynomial; distinct simple roots
  // of g mod p lift by Newton iteration.
  std::vector<PadicScalar> gcs;
  for (int i = 0; i <= d; ++i)
    gcs.push_back(f.coeff(i).shifted(m * i - m * d));
  PadicPoly g(p, std::move(gcs));
  std::vector<long> simple_roots;
  for (long r = 0; r < p; ++r) {
    // evaluate g mod p at r
    mpz_class acc(0);
    for (int i = d; i >= 0; --i) {
      const PadicScalar& c = g.coeff(i);
      mpz_class cv = 0;
      if (c.known_nonzero() && c.valuation() == 0)
        cv = c.unit() % p;
      else if (c.known_nonzero() && c.valuation() < 0)
        throw PrecisionExhausted("unit polynomial has negative valuation");
      acc = (acc * r + cv) % p;
    }
    if (acc == 0) simple_roots.push_back(r);
  }
  if (static_cast<int>(simple_roots.size()) != d) return {};  // not split
  // Newton-lift each root; separability mod p guarantees quadratic steps.
  for (long r0 : simple_roots) {
    PadicScalar x = PadicScalar::from_int(p, r0);
    for (int iter = 0; iter < 64; ++iter) {
      PadicScalar fx = g.eval(x);
      if (!fx.known_nonzero()) break;
      // derivative eval
      PadicScalar dfx = PadicScalar::zero(p);
      for (int i = g.degree(); i >= 1; --i)
        dfx = dfx * x + g.coeff(i) * PadicScalar::from_int(p, i);
      if (!dfx.known_nonzero() || dfx.valuation() != 0) return {};  // not separable
      x = x - fx / dfx;
    }
    // A simple root is pinned only to the residual valuation of g(x):
    // digits beyond that bound are artifacts of the representative.
    x = x.capped(g.eval(x).val_lower_bound());
    roots.push_back(x.shifted(m));
  }
  return roots;
}

}  // namespace

SubobjectEnumeration enumerate_subisocrystals(const Isocrystal& E,
                                              const std::vector<PMat>& generators) {
  const int p = E.prime();
  const int n = E.dim();
  auto parts = slope_decomposition(E);
  PadicPoly cp = charpoly(E.frobenius());
  auto factors = slope_factorization(cp);

  SubobjectEnumeration result;
  std::vector<PMat> atoms;
  for (const auto& part : parts) {
    // A part whose dimension equals the slope denominator is simple: any
    // nonzero subobject would need dimension divisible by the denominator.
    Rat slope_c = part.slope;
    slope_c.canonicalize();
    const long den = slope_c.get_den().get_si();
    if (part.basis.cols() == den || part.basis.cols() == 1) {
      atoms.push_back(part.basis);
      continue;
    }
    bool split = false;
    for (const auto& [slope, factor] : factors) {
      if (slope != part.slope) continue;
      auto roots = split_isoclinic_factor(factor, slope);
      if (static_cast<int>(roots.size()) == part.basis.cols()) {
        for (const auto& root : roots) {
          PMat shifted = E.frobenius() - PMat::identity(p, n).scaled(root);
          atoms.push_back(kernel(shifted, 1));
        }
        split = true;
      }
      break;
    }
    if (!split) {
      result.complete = false;
      atoms.push_back(part.basis);
    }
  }
  for (const auto& gen : generators) {
    PMat g = canonical_image(gen);
    if (g.rows() != n) throw ShapeMismatch("generator rows mismatch");
    if (!contains_span(g, E.frobenius() * g))
      throw NotStable("user generator is not Frobenius-stable");
    atoms.push_back(g);
  }

  std::map<std::string, PMat> dedup;
  PMat zero(p, n, 0);
  dedup.emplace(span_key(zero), zero);
  const size_t count = atoms.size();
  if (count > 14) throw BudgetExceeded("too many subobject atoms");
  for (size_t mask = 1; mask < (1u << count); ++mask) {
    PMat acc(p, n, 0);
    for (size_t i = 0; i < count; ++i)
      if (mask & (1u << i)) acc = acc.cols() ? sum_spans(acc, atoms[i]) : atoms[i];
    acc = canonical_image(acc);
    dedup.emplace(span_key(acc), acc);
  }
  for (auto& [key, span] : dedup) result.subspaces.push_back(span);
  // Deterministic order: by dimension, then canonical key.
  std::stable_sort(result.subspaces.begin(), result.subspaces.end(),
                   [](const PMat& a, const PMat& b) { return a.cols() < b.cols(); });
  return result;
}

SemistabilityVerdict is_semistable(const Isocrystal& E, const FilteredSpace& F,
                                   const std::vector<PMat>& generators) {
  if (F.ambient_dim() != E.dim()) throw DimensionMismatch("filtration/isocrystal dims");
  auto enumeration = enumerate_subisocrystals(E, generators);
  SemistabilityVerdict verdict;
  verdict.enumeration_complete = enumeration.complete;
  verdict.ambient_slope = degree_and_slope(F).second;
  bool found = false;
  for (const auto& W : enumeration.subspaces) {
    if (W.cols() == 0 || W.cols() == E.dim()) continue;
    Rat mu = degree_and_slope(induced_filtration(F, W)).second;
    if (mu > verdict.ambient_slope) {
      if (!found || mu > verdict.witness_slope ||
          (mu == verdict.witness_slope && W.cols() > verdict.witness->cols())) {
        verdict.witness = W;
        verdict.witness_slope = mu;
        found = true;
      }
    }
  }
  verdict.semistable = !found;
  return verdict;
}

namespace {

// Basis of `big` extending `sub`, so the quotient reads off the bottom
// coordinate block.
PMat completed_basis(const PMat& sub, const PMat& big) {
  PMat S = canonical_image(sub);
  PMat B = canonical_image(big);
  if (!contains_span(B, S)) throw ValidationError("quotient needs sub inside big");
  if (B.cols() <= S.cols()) throw ValidationError("quotient of equal spaces");
  PMat basis = S;
  for (int j = 0; j < B.cols() && basis.cols() < B.cols(); ++j) {
    PMat cand = basis.cols() ? basis.hcat(PMat::column(B.col(j)))
                             : PMat::column(B.col(j));
    if (rank(cand) > basis.cols()) basis = cand;
  }
  if (basis.cols() != B.cols()) throw RankDeficient("could not complete quotient basis");
  return basis;
}

FilteredSpace quotient_filtration_in(const FilteredSpace& F, const PMat& basis, int ds,
                                     const PMat& big) {
  const int p = F.prime();
  const int db = basis.cols();
  std::vector<FilStep> steps;
  int prev_dim = 0;
  for (const auto& st : F.steps()) {
    PMat inter = intersect_spans(st.basis, big);
    if (inter.cols() == 0) continue;
    PMat coords = solve_in_span(basis, inter);
    PMat bottom(p, db - ds, coords.cols());
    for (int i = ds; i < db; ++i)
      for (int j = 0; j < coords.cols(); ++j) bottom.at(i - ds, j) = coords.at(i, j);
    PMat img = canonical_image(bottom);
    if (img.cols() > prev_dim) {
      steps.push_back(FilStep{st.jump, img});
      prev_dim = img.cols();
    }
  }
  if (steps.empty() || prev_dim != db - ds)
    throw ValidationError("quotient filtration did not reach full support");
  return FilteredSpace(p, db - ds, std::move(steps));
}

}  // namespace

FilteredSpace quotient_filtration(const FilteredSpace& F, const PMat& sub,
                                  const PMat& big) {
  PMat basis = completed_basis(sub, big);
  return quotient_filtration_in(F, basis, canonical_image(sub).cols(),
                                canonical_image(big));
}

QuotientPiece quotient_piece(const Isocrystal& E, const FilteredSpace& F,
                             const PMat& sub, const PMat& big) {
  const int p = E.prime();
  PMat basis = completed_basis(sub, big);
  const int ds = canonical_image(sub).cols();
  const int db = basis.cols();
  // Frobenius of big in this basis; quotient block is rows/cols >= ds.
  PMat m = solve_in_span(basis, E.frobenius() * basis);
  PMat q(p, db - ds, db - ds);
  for (int i = ds; i < db; ++i)
    for (int j = ds; j < db; ++j) q.at(i - ds, j - ds) = m.at(i, j);
  Isocrystal Eq(p, q);
  return QuotientPiece{Eq, quotient_filtration_in(F, basis, ds, canonical_image(big))};
}

std::vector<HnStep> hn_filtration(const Isocrystal& E, const FilteredSpace& F,
                                  const std::vector<PMat>& generators) {
  if (F.ambient_dim() != E.dim()) throw DimensionMismatch("filtration/isocrystal dims");
  auto enumeration = enumerate_subisocrystals(E, generators);
  const int p = E.prime();
  std::vector<HnStep> steps;
  PMat prev(p, E.dim(), 0);
  Rat prev_deg(0);
  while (prev.cols() < E.dim()) {
    bool found = false;
    PMat best(p, E.dim(), 0);
    Rat best_slope;
    for (const auto& W : enumeration.subspaces) {
      if (W.cols() <= prev.cols()) continue;
      if (prev.cols() > 0 && !contains_span(W, prev)) continue;
      Rat deg_w = degree_and_slope(induced_filtration(F, W)).first;
      Rat slope = (deg_w - prev_deg) / Rat(W.cols() - prev.cols());
      slope.canonicalize();
      if (!found || slope > best_slope ||
          (slope == best_slope && W.cols() > best.cols())) {
        best = W;
        best_slope = slope;
        found = true;
      }
    }
    if (!found) throw PrecisionExhausted("no extension found in HN construction");
    steps.push_back(HnStep{best, best_slope});
    prev_deg = degree_and_slope(induced_filtration(F, best)).first;
    prev = best;
  }
  for (size_t i = 1; i < steps.size(); ++i)
    if (!(steps[i - 1].slope > steps[i].slope))
      throw PrecisionExhausted("HN slopes failed to decrease strictly");
  return steps;
}

Rat hm_invariant(const FilteredSpace& F, const OneParamSubgroup& lambda) {
  // The brute-force Def-3.5 oracle pins the F_lambda convention: pairing F
  // against the inverse cocharacter's filtration makes "positive invariant"
  // coincide with "destabilized" on every instance, while the naive sign
  // only agrees on frame-aligned flags.
  std::vector<Int> negated;
  negated.reserve(lambda.weights().size());
  for (Int w : lambda.weights()) negated.push_back(-w);
  OneParamSubgroup inverse(std::move(negated), lambda.frame());
  return filtration_pairing(F, filtration_from_1ps(inverse));
}

std::string FlagDistance::to_string() const {
  if (!exponent.has_value()) return "0";
  if (*exponent == 0) return "1";
  return "p^-" + std::to_string(*exponent);
}

Rat FlagDistance::value(int prime) const {
  if (!exponent.has_value()) return Rat(0);
  Rat v(1, mpz_power(mpz_class(prime), static_cast<unsigned long>(*exponent)));
  v.canonicalize();
  return v;
}

FlagDistance flag_distance(const FilteredSpace& F1, const FilteredSpace& F2) {
  if (F1.prime() != F2.prime()) throw ShapeMismatch("mixed primes");
  if (F1.ambient_dim() != F2.ambient_dim()) throw ShapeMismatch("ambient dims differ");
  const auto& s1 = F1.steps();
  const auto& s2 = F2.steps();
  if (s1.size() != s2.size()) throw ShapeMismatch("different jump sets");
  std::optional<Int> best;  // smallest exponent across steps = largest distance
  for (size_t k = 0; k < s1.size(); ++k) {
    if (s1[k].jump != s2[k].jump || s1[k].basis.cols() != s2[k].basis.cols())
      throw ShapeMismatch("different jump sets or step dimensions");
    auto pl1 = pluecker(s1[k].basis);
    auto pl2 = pluecker(s2[k].basis);
    Int v1 = kValInfinity, v2 = kValInfinity;
    for (const auto& x : pl1)
      if (x.known_nonzero()) v1 = std::min(v1, x.valuation());
    for (const auto& x : pl2)
      if (x.known_nonzero()) v2 = std::min(v2, x.valuation());
    if (v1 == kValInfinity || v2 == kValInfinity)
      throw RankDeficient("step basis has no certified Pluecker coordinate");
    std::optional<Int> step_exp;
    for (size_t i = 0; i < pl1.size(); ++i)
      for (size_t j = i + 1; j < pl1.size(); ++j) {
        PadicScalar cross = pl1[i] * pl2[j] - pl1[j] * pl2[i];
        if (!cross.known_nonzero()) continue;
        Int e = cross.valuation() - v1 - v2;
        if (!step_exp.has_value() || e < *step_exp) step_exp = e;
      }
    if (step_exp.has_value() && (!best.has_value() || *step_exp < *best))
      best = step_exp;
  }
  return FlagDistance{best};
}

}  // namespace phodge

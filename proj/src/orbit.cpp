#include "phodge/orbit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace phodge {

namespace {

PadicScalar factorial_scalar(int prime, int k) {
  mpz_class f(1);
  for (int i = 2; i <= k; ++i) f *= i;
  return PadicScalar::from_integer(prime, f);
}

// exp(A) for a nilpotent matrix: the exact finite polynomial sum.
PMat nilpotent_exp(const PMat& A, int index) {
  const int p = A.prime();
  const int n = A.rows();
  PMat acc = PMat::identity(p, n);
  PMat power = PMat::identity(p, n);
  for (int k = 1; k <= index; ++k) {
    power = power * A;
    acc = acc + power.scaled(factorial_scalar(p, k).inverse());
  }
  return acc;
}

// Matrix of polynomials exp(tN), entries low degree first.
std::vector<std::vector<PadicPoly>> exp_t_matrix(const NilpotentOperator& N) {
  const int p = N.prime();
  const int n = N.dim();
  std::vector<std::vector<std::vector<PadicScalar>>> coeffs(
      n, std::vector<std::vector<PadicScalar>>(n));
  PMat power = PMat::identity(p, n);
  for (int k = 0; k <= std::max(0, N.nilpotency_index() - 1); ++k) {
    PadicScalar inv_fact = factorial_scalar(p, k).inverse();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) coeffs[i][j].push_back(power.at(i, j) * inv_fact);
    power = power * N.matrix();
  }
  std::vector<std::vector<PadicPoly>> out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i].emplace_back(p, coeffs[i][j]);
  return out;
}

FilteredSpace transport(const FilteredSpace& F, const PMat& U) {
  std::vector<FilStep> steps;
  for (const auto& st : F.steps()) steps.push_back(FilStep{st.jump, U * st.basis});
  return FilteredSpace(F.prime(), F.ambient_dim(), std::move(steps));
}

}  // namespace

NilpotentOperator::NilpotentOperator(PMat matrix, std::optional<Int> twist)
    : matrix_(std::move(matrix)), index_(0), twist_(twist) {
  if (matrix_.rows() != matrix_.cols())
    throw ValidationError("nilpotent operator must be square");
  if (matrix_.is_zero_at_precision()) {
    index_ = 0;
    return;
  }
  PMat power = matrix_;
  int k = 1;
  while (k <= matrix_.rows()) {
    if (power.is_zero_at_precision()) break;
    power = power * matrix_;
    ++k;
  }
  if (k > matrix_.rows())
    throw ValidationError("matrix is not nilpotent within tracked precision");
  index_ = k;
}

PeriodMapModel::PeriodMapModel(FilteredSpace base, std::vector<PMat> sen_coeffs,
                               Int domain_radius_exponent)
    : base_(std::move(base)), sen_coeffs_(std::move(sen_coeffs)),
      radius_(domain_radius_exponent) {
  const int p = base_.prime();
  const Int need = (p == 2) ? 2 : 1;
  if (radius_ < 1) throw ValidationError("domain radius exponent must be >= 1");
  for (size_t k = 0; k < sen_coeffs_.size(); ++k) {
    const auto& C = sen_coeffs_[k];
    if (C.rows() != base_.ambient_dim() || C.cols() != base_.ambient_dim())
      throw ShapeMismatch("Sen coefficient dimensions");
    if (C.prime() != p) throw ValidationError("Sen coefficient prime mismatch");
    if (C.is_zero_at_precision()) continue;
    // n(t)*t must stay in the exp domain for val(t) >= radius.
    Int bound = C.min_val_bound() + static_cast<Int>(k + 1) * radius_;
    if (bound < need)
      throw ValidationError("Sen family leaves the exp domain on the stated disc");
  }
}

PMat PeriodMapModel::sen_at(const PadicScalar& l) const {
  const int p = prime();
  PMat acc(p, dim(), dim());
  PadicScalar power = PadicScalar::one(p);
  for (size_t k = 0; k < sen_coeffs_.size(); ++k) {
    acc = acc + sen_coeffs_[k].scaled(power);
    power = power * l;
  }
  return acc;
}

PhiNCompat phi_n_compat(const NilpotentOperator& N, const Isocrystal& E) {
  if (N.dim() != E.dim()) throw DimensionMismatch("operator/isocrystal dims");
  PhiNCompat out;
  if (N.is_zero()) {
    out.any_r = true;
    return out;
  }
  PMat A = N.matrix() * E.frobenius();
  PMat B = E.frobenius() * N.matrix();
  std::optional<Int> r;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      const auto& a = A.at(i, j);
      const auto& b = B.at(i, j);
      if (a.known_nonzero() != b.known_nonzero()) return out;
      if (!a.known_nonzero()) continue;
      Int cand = a.valuation() - b.valuation();
      if (r.has_value() && *r != cand) return out;
      r = cand;
    }
  if (!r.has_value() || *r < 1) return out;
  // Verify the full matrix identity at tracked precision.
  PMat diff = A - B.scaled(PadicScalar::p_power(A.prime(), *r));
  if (!diff.is_zero_at_precision()) return out;
  out.r = r;
  return out;
}

FilteredSpace orbit_eval(const std::vector<NilpotentOperator>& Ns,
                         const std::vector<PadicScalar>& ts, const FilteredSpace& F0) {
  if (Ns.empty() || Ns.size() != ts.size())
    throw ValidationError("orbit_eval needs matching operator/parameter lists");
  const int p = F0.prime();
  const int n = F0.ambient_dim();
  PMat A(p, n, n);
  for (size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i].dim() != n) throw DimensionMismatch("operator dimension");
    A = A + Ns[i].matrix().scaled(ts[i]);
  }
  // The mixed sum must itself be nilpotent.
  PMat power = A;
  for (int k = 1; k < n && !power.is_zero_at_precision(); ++k) power = power * A;
  if (!power.is_zero_at_precision())
    throw NotNilpotentSum("sum of scaled operators is not nilpotent");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A.at(i, j).known_nonzero() && A.at(i, j).abs_precision() <= 0)
        throw DenominatorPrecision("no certified digits left in exponential input");
  PMat U = nilpotent_exp(A, n - 1);
  return transport(F0, U);
}

FilteredSpace orbit_eval(const NilpotentOperator& N, const PadicScalar& t,
                         const FilteredSpace& F0) {
  return orbit_eval(std::vector<NilpotentOperator>{N}, std::vector<PadicScalar>{t}, F0);
}

FilteredSpace orbit_limit(const NilpotentOperator& N, const FilteredSpace& F0,
                          bool val_to_minus_infinity) {
  if (N.dim() != F0.ambient_dim()) throw DimensionMismatch("operator/flag dims");
  auto expt = exp_t_matrix(N);
  const int p = F0.prime();
  const int n = F0.ambient_dim();
  std::vector<FilStep> steps;
  for (const auto& st : F0.steps()) {
    std::vector<std::vector<PadicPoly>> cols;
    for (int j = 0; j < st.basis.cols(); ++j) {
      std::vector<PadicPoly> col(static_cast<size_t>(n), PadicPoly(p));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          col[i] = col[i] + expt[i][k].scaled(st.basis.at(k, j));
      cols.push_back(std::move(col));
    }
    steps.push_back(FilStep{st.jump, grassmann_limit(std::move(cols),
                                                     val_to_minus_infinity)});
  }
  return FilteredSpace(p, n, std::move(steps));
}

OrbitVerdict nilpotent_orbit_check(const NilpotentOperator& N, const Isocrystal& E,
                                   const FilteredSpace& F0,
                                   const std::vector<PMat>& generators) {
  OrbitVerdict verdict;
  verdict.compat = phi_n_compat(N, E);
  verdict.limit = orbit_limit(N, F0, true);
  verdict.semistability = is_semistable(E, *verdict.limit, generators);
  verdict.is_orbit = verdict.compat.compatible() && verdict.semistability.semistable;
  return verdict;
}

namespace {

// Certified truncation of exp(A) for A with entry valuations above the exp
// domain bound.
PMat matrix_exp_certified(const PMat& A) {
  const int p = A.prime();
  const int n = A.rows();
  const Int vmin = A.min_val_bound();
  const Int need = (p == 2) ? 2 : 1;
  if (vmin < need) throw OutOfDomain("matrix exponential outside convergence domain");
  Int target = kValInfinity;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) target = std::min(target, A.at(i, j).abs_precision());
  PMat acc = PMat::identity(p, n);
  PMat power = PMat::identity(p, n);
  Int tail = 0;
  for (int k = 1; k < 8 * 64 + 16; ++k) {
    tail = static_cast<Int>(k) * vmin - (static_cast<Int>(k) - 1) / (p - 1);
    if (tail >= target) break;
    power = power * A;
    acc = acc + power.scaled(factorial_scalar(p, k).inverse());
  }
  const Int bound = std::min(target, tail);
  PMat out(p, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.at(i, j) = acc.at(i, j).capped(bound);
  return out;
}

}  // namespace

FilteredSpace twisted_orbit_eval(const NilpotentOperator& N, const PeriodMapModel& model,
                                 const PadicScalar& z) {
  const int p = model.prime();
  if (N.dim() != model.dim()) throw DimensionMismatch("operator/model dims");
  if (!z.is_exact_zero() && z.val_lower_bound() < model.domain_radius_exponent())
    throw OutOfDomain("parameter outside the model's disc");
  PadicScalar l = padic_log(PadicScalar::one(p) + z);
  if (l.is_zero_at_precision() && !z.known_nonzero()) {
    // z = 0 within precision: the point is the base flag.
    return model.base();
  }
  PMat sen = model.sen_at(l).scaled(l);
  PMat U_sen = sen.is_zero_at_precision() ? PMat::identity(p, model.dim())
                                          : matrix_exp_certified(sen);
  PMat U_nil = PMat::identity(p, model.dim());
  if (!N.is_zero()) {
    PMat A = N.matrix().scaled(l);
    U_nil = nilpotent_exp(A, N.nilpotency_index());
  }
  return transport(model.base(), U_nil * U_sen);
}

DecayReport distance_decay_report(const NilpotentOperator& N, const PeriodMapModel& model,
                                  const std::vector<Int>& sample_vals) {
  const int p = model.prime();
  DecayReport report;
  FilteredSpace F_inf = orbit_limit(N, model.base(), true);
  for (Int v : sample_vals) {
    if (v < model.domain_radius_exponent())
      throw OutOfDomain("sample valuation below the model's disc radius");
    PadicScalar z = PadicScalar::p_power(p, v);
    PadicScalar l = padic_log(PadicScalar::one(p) + z);
    PMat U_nil = N.is_zero() ? PMat::identity(p, model.dim())
                             : nilpotent_exp(N.matrix().scaled(l), N.nilpotency_index());
    FilteredSpace xi = transport(F_inf, U_nil);
    PMat sen = model.sen_at(l).scaled(l);
    PMat U_sen = sen.is_zero_at_precision() ? PMat::identity(p, model.dim())
                                            : matrix_exp_certified(sen);
    FilteredSpace theta = transport(model.base(), U_sen);
    report.rows.push_back(DecayRow{v, flag_distance(xi, theta)});
  }
  // Least-squares slope of the distance exponent against val(z), over rows
  // with a finite positive distance exponent.
  std::vector<std::pair<Rat, Rat>> pts;
  for (const auto& row : report.rows)
    if (row.dist.exponent.has_value())
      pts.emplace_back(Rat(static_cast<long>(row.val)),
                       Rat(static_cast<long>(*row.dist.exponent)));
  if (pts.size() >= 2) {
    Rat n(static_cast<long>(pts.size()));
    Rat sx(0), sy(0), sxx(0), sxy(0);
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    Rat denom = n * sxx - sx * sx;
    if (denom != 0) {
      Rat slope = (n * sxy - sx * sy) / denom;
      slope.canonicalize();
      report.fitted_exponent = slope;
    }
  }
  return report;
}

ConjugationResult conjugation_limit(const NilpotentOperator& N, const PMat& g) {
  if (N.dim() != g.rows() || g.rows() != g.cols())
    throw DimensionMismatch("conjugation dimensions");
  const int p = N.prime();
  const int n = N.dim();
  // exp(tN) g exp(-tN) = sum_k t^k/k! ad_N^k(g), a finite polynomial.
  ConjugationResult result;
  std::vector<PMat> coefficients;
  PMat cur = g;
  coefficients.push_back(cur);
  for (int k = 1; k <= 2 * n; ++k) {
    cur = N.matrix() * cur - cur * N.matrix();
    if (cur.is_zero_at_precision()) break;
    coefficients.push_back(cur.scaled(factorial_scalar(p, k).inverse()));
  }
  for (size_t k = 1; k < coefficients.size(); ++k) {
    if (!coefficients[k].is_zero_at_precision()) {
      result.converged = false;
      result.diverging_power = static_cast<int>(k);
      result.coefficient = coefficients[k];
      return result;
    }
  }
  result.converged = true;
  result.value = coefficients[0];
  return result;
}

namespace {

struct JordanChain {
  std::vector<int> column_indices;  // positions in the chain basis matrix
  int length;
};

struct ChainData {
  PMat basis;  // columns: chain by chain, head first
  std::vector<JordanChain> chains;
};

ChainData jordan_chains(const NilpotentOperator& N) {
  const int p = N.prime();
  const int n = N.dim();
  const int idx = N.nilpotency_index();
  // Kernels of N^j.
  std::vector<PMat> K(static_cast<size_t>(idx) + 1, PMat(p, n, 0));
  PMat power = PMat::identity(p, n);
  for (int j = 1; j <= idx; ++j) {
    power = power * N.matrix();
    K[j] = kernel(power);
  }
  std::vector<std::pair<int, PMat>> heads;  // (chain length, head vector)
  PMat covered(p, n, 0);
  for (int j = idx; j >= 1; --j) {
    // Space already covered at level j: K_{j-1} plus N^(len-j) images of
    // longer chains' heads.
    PMat base = (j >= 2) ? K[j - 1] : PMat(p, n, 0);
    for (const auto& [len, head] : heads) {
      PMat img = head;
      for (int s = 0; s < len - j; ++s) img = N.matrix() * img;
      base = base.cols() ? sum_spans(base, img) : canonical_image(img);
    }
    for (int c = 0; c < K[j].cols(); ++c) {
      PMat cand = PMat::column(K[j].col(c));
      if (base.cols() > 0 && contains_span(base, cand)) continue;
      if (base.cols() == 0 && cand.is_zero_at_precision()) continue;
      heads.emplace_back(j, cand);
      base = base.cols() ? sum_spans(base, cand) : canonical_image(cand);
    }
  }
  std::sort(heads.begin(), heads.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  ChainData data;
  data.basis = PMat(p, n, n);
  int col = 0;
  for (const auto& [len, head] : heads) {
    JordanChain chain;
    chain.length = len;
    PMat vec = head;
    for (int s = 0; s < len; ++s) {
      chain.column_indices.push_back(col);
      for (int i = 0; i < n; ++i) data.basis.at(i, col) = vec.at(i, 0);
      ++col;
      if (s + 1 < len) vec = N.matrix() * vec;
    }
    data.chains.push_back(std::move(chain));
  }
  if (col != n) throw PrecisionExhausted("Jordan chain basis incomplete");
  if (rank(data.basis) != n)
    throw PrecisionExhausted("Jordan chain basis not independent at precision");
  return data;
}

}  // namespace

Sl2Triple jacobson_morozov(const NilpotentOperator& N) {
  if (N.is_zero()) throw ZeroNilpotent("sl2-triple through the zero operator");
  const int p = N.prime();
  const int n = N.dim();
  ChainData data = jordan_chains(N);
  PMat H_std(p, n, n);
  PMat X_std(p, n, n);  // raising in the chain basis
  for (const auto& chain : data.chains) {
    const int m = chain.length;
    for (int s = 0; s < m; ++s) {
      const int c = chain.column_indices[s];
      H_std.at(c, c) = PadicScalar::from_int(p, m - 1 - 2 * s);
      if (s >= 1) {
        // X+ maps the s-th chain vector to s*(m-s) times the previous one.
        X_std.at(chain.column_indices[s - 1], c) =
            PadicScalar::from_int(p, static_cast<long>(s) * (m - s));
      }
    }
  }
  PMat P = data.basis;
  PMat Pinv = solve_in_span(P, PMat::identity(p, n));
  Sl2Triple triple{N.matrix(), P * H_std * Pinv, P * X_std * Pinv};
  // Bracket relations, exact at tracked precision.
  auto bracket = [](const PMat& a, const PMat& b) { return a * b - b * a; };
  if (!(bracket(triple.semisimple, triple.raising) - triple.raising.scaled(
            PadicScalar::from_int(p, 2))).is_zero_at_precision())
    throw PrecisionExhausted("[H, X+] = 2X+ failed at tracked precision");
  if (!(bracket(triple.semisimple, triple.lowering) + triple.lowering.scaled(
            PadicScalar::from_int(p, 2))).is_zero_at_precision())
    throw PrecisionExhausted("[H, X-] = -2X- failed at tracked precision");
  if (!(bracket(triple.raising, triple.lowering) - triple.semisimple)
           .is_zero_at_precision())
    throw PrecisionExhausted("[X+, X-] = H failed at tracked precision");
  return triple;
}

WeightFiltration monodromy_weight_filtration(const NilpotentOperator& N) {
  const int p = N.prime();
  const int n = N.dim();
  WeightFiltration M;
  if (N.is_zero()) {
    M.steps.push_back(WeightStep{0, PMat::identity(p, n)});
    return M;
  }
  ChainData data = jordan_chains(N);
  // Column weights in the chain basis.
  std::map<Int, std::vector<int>> by_weight;
  for (const auto& chain : data.chains)
    for (int s = 0; s < chain.length; ++s)
      by_weight[chain.length - 1 - 2 * s].push_back(chain.column_indices[s]);
  std::vector<int> cols_so_far;
  for (auto& [w, cols] : by_weight) {
    for (int c : cols) cols_so_far.push_back(c);
    PMat basis(p, n, static_cast<int>(cols_so_far.size()));
    for (size_t k = 0; k < cols_so_far.size(); ++k)
      for (int i = 0; i < n; ++i) basis.at(i, static_cast<int>(k)) =
          data.basis.at(i, cols_so_far[k]);
    M.steps.push_back(WeightStep{w, canonical_image(basis)});
  }
  // Axioms: N M_i inside M_{i-2}, and N^k of rank dim gr_k from gr_k to gr_{-k}.
  for (const auto& st : M.steps) {
    PMat img = N.matrix() * st.basis;
    PMat lower(p, n, 0);
    for (const auto& other : M.steps)
      if (other.index <= st.index - 2) lower = other.basis;
    if (!img.is_zero_at_precision() && (lower.cols() == 0 || !contains_span(lower, img)))
      throw PrecisionExhausted("weight filtration axiom N M_i in M_{i-2} failed");
  }
  for (const auto& [w, cols] : by_weight) {
    if (w <= 0) continue;
    PMat Wk(p, n, static_cast<int>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k)
      for (int i = 0; i < n; ++i) Wk.at(i, static_cast<int>(k)) =
          data.basis.at(i, cols[k]);
    PMat img = Wk;
    for (Int s = 0; s < w; ++s) img = N.matrix() * img;
    if (rank(img) != Wk.cols())
      throw PrecisionExhausted("weight filtration axiom gr_k ~ gr_{-k} failed");
  }
  return M;
}

MixedGradedResult mixed_graded_check(const WeightFiltration& P, const FilteredSpace& F,
                                     const std::vector<Isocrystal>& per_weight) {
  if (P.steps.empty()) throw ValidationError("empty weight filtration");
  const int p = F.prime();
  const int n = F.ambient_dim();
  for (size_t i = 0; i < P.steps.size(); ++i) {
    if (P.steps[i].basis.rows() != n) throw ShapeMismatch("weight step rows");
    if (i > 0 && P.steps[i].index <= P.steps[i - 1].index)
      throw ValidationError("weight indices must increase");
    if (i > 0 && !contains_span(P.steps[i].basis, P.steps[i - 1].basis))
      throw ValidationError("weight steps must be nested increasing");
  }
  if (P.steps.back().basis.cols() != n)
    throw ShapeMismatch("weight filtration must exhaust the space");
  if (!per_weight.empty() && per_weight.size() != P.steps.size())
    throw ShapeMismatch("per-weight isocrystal count");

  MixedGradedResult result;
  PMat prev(p, n, 0);
  for (size_t j = 0; j < P.steps.size(); ++j) {
    const auto& st = P.steps[j];
    std::ostringstream note;
    note << "gr_" << st.index << ": ";
    try {
      FilteredSpace graded = quotient_filtration(F, prev, st.basis);
      note << "dim " << graded.rank() << ", induced filtration valid";
      if (!per_weight.empty()) {
        const Isocrystal& Ej = per_weight[j];
        if (Ej.dim() != graded.rank())
          throw ShapeMismatch("per-weight isocrystal dimension");
        auto verdict = is_semistable(Ej, graded);
        note << (verdict.semistable ? ", semistable" : ", NOT semistable");
        if (!verdict.semistable) result.ok = false;
      }
    } catch (const Error& e) {
      result.ok = false;
      note << "invalid (" << e.what() << ")";
    }
    result.notes.push_back(note.str());
    prev = st.basis;
  }
  return result;
}

namespace {

std::vector<std::vector<Rat>> pool_vectors(const std::vector<Rat>& pool, int n) {
  std::vector<std::vector<Rat>> out;
  std::vector<int> idx(static_cast<size_t>(n), 0);
  const int s = static_cast<int>(pool.size());
  for (;;) {
    std::vector<Rat> v;
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      v.push_back(pool[idx[i]]);
      if (pool[idx[i]] != 0) nonzero = true;
    }
    if (nonzero) out.push_back(std::move(v));
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == s - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return out;
}

}  // namespace

std::vector<OrbitInstance> orbit_search(const Isocrystal& E,
                                        const std::vector<Rat>& jump_multiset,
                                        const OrbitSearchConfig& config) {
  const int p = E.prime();
  const int n = E.dim();
  if (n > 4) throw ValidationError("orbit search is scoped to dimension <= 4");
  if (config.pool.empty()) throw ValidationError("empty coefficient pool");
  if (static_cast<int>(jump_multiset.size()) != n)
    throw ValidationError("jump multiset must list one jump per dimension");

  // Distinct jumps descending with graded multiplicities.
  std::vector<Rat> jumps(jump_multiset);
  std::sort(jumps.begin(), jumps.end(), [](const Rat& a, const Rat& b) { return a > b; });
  std::vector<std::pair<Rat, int>> levels;
  for (const auto& j : jumps) {
    if (!levels.empty() && levels.back().first == j)
      ++levels.back().second;
    else
      levels.emplace_back(j, 1);
  }

  long budget = config.budget;
  auto spend = [&budget](long cost) {
    budget -= cost;
    if (budget < 0) throw BudgetExceeded("orbit search budget exhausted");
  };

  // Candidate nilpotents: pool-valued matrices, nilpotent, Eq-36 compatible.
  std::vector<NilpotentOperator> candidates;
  {
    const long cells = static_cast<long>(n) * n;
    const long s = static_cast<long>(config.pool.size());
    long total = 1;
    for (long c = 0; c < cells; ++c) {
      total *= s;
      if (total > config.budget) throw BudgetExceeded("nilpotent grid too large");
    }
    std::vector<int> idx(static_cast<size_t>(cells), 0);
    for (;;) {
      spend(1);
      std::vector<std::vector<Rat>> rows(n, std::vector<Rat>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows[i][j] = config.pool[idx[i * n + j]];
      try {
        NilpotentOperator N(PMat::from_rational_rows(p, rows));
        if (phi_n_compat(N, E).compatible()) candidates.push_back(std::move(N));
      } catch (const ValidationError&) {
      }
      int pos = static_cast<int>(cells) - 1;
      while (pos >= 0 && idx[pos] == static_cast<int>(config.pool.size()) - 1)
        idx[pos--] = 0;
      if (pos < 0) break;
      ++idx[pos];
    }
  }

  // Candidate flags: chains of pool-vector spans with the level dimensions.
  std::vector<FilteredSpace> flags;
  {
    auto vecs = pool_vectors(config.pool, n);
    std::map<std::string, FilteredSpace> dedup;
    // Build flags by repeatedly extending with pool vectors.
    struct Partial {
      std::vector<FilStep> steps;
      PMat span;
    };
    std::vector<Partial> work{{{}, PMat(p, n, 0)}};
    for (size_t lv = 0; lv < levels.size(); ++lv) {
      const int want = levels[lv].second;
      std::vector<Partial> next;
      for (const auto& part : work) {
        // Extend by `want` dimensions using pool vectors.
        std::vector<PMat> grow{part.span};
        for (int step = 0; step < want; ++step) {
          std::map<std::string, PMat> uniq;
          for (const auto& span : grow) {
            for (const auto& v : vecs) {
              spend(1);
              std::vector<std::vector<Rat>> col(n, std::vector<Rat>(1));
              for (int i = 0; i < n; ++i) col[i][0] = v[i];
              PMat cand = PMat::from_rational_rows(p, col);
              if (span.cols() > 0 && contains_span(span, cand)) continue;
              PMat grown = span.cols() ? sum_spans(span, cand) : canonical_image(cand);
              uniq.emplace(span_key(grown), grown);
            }
          }
          grow.clear();
          for (auto& [key, g] : uniq) grow.push_back(g);
        }
        for (const auto& span : grow) {
          Partial ext = part;
          ext.steps.push_back(FilStep{levels[lv].first, span});
          ext.span = span;
          next.push_back(std::move(ext));
        }
      }
      work = std::move(next);
    }
    for (const auto& part : work) {
      if (part.span.cols() != n) continue;
      FilteredSpace F(p, n, part.steps);
      std::ostringstream key;
      for (const auto& st : F.steps()) key << rat_to_string(st.jump) << "|" << span_key(st.basis);
      dedup.emplace(key.str(), F);
    }
    for (auto& [key, F] : dedup) flags.push_back(F);
  }

  std::vector<OrbitInstance> found;
  for (const auto& N : candidates) {
    for (const auto& F0 : flags) {
      spend(1);
      auto verdict = nilpotent_orbit_check(N, E, F0);
      if (!verdict.is_orbit) continue;
      // Re-verify from scratch before recording.
      auto again = nilpotent_orbit_check(N, E, F0);
      if (!again.is_orbit) continue;
      OrbitInstance inst{N.matrix(), F0, again.compat, *again.limit,
                         again.semistability.semistable,
                         again.semistability.enumeration_complete};
      found.push_back(std::move(inst));
    }
  }
  return found;
}

}  // namespace phodge

#include "phodge/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace phodge {

PMat::PMat(int prime, int rows, int cols)
    : prime_(prime), rows_(rows), cols_(cols),
      a_(static_cast<size_t>(rows) * cols, PadicScalar::zero(prime)) {}

PMat PMat::identity(int prime, int n, Int rel_prec) {
  PMat m(prime, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = PadicScalar::one(prime, rel_prec);
  return m;
}

PMat PMat::from_rational_rows(int prime, const std::vector<std::vector<Rat>>& rows,
                              Int rel_prec) {
  if (rows.empty()) return PMat(prime, 0, 0);
  PMat m(prime, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (static_cast<int>(rows[i].size()) != m.cols())
      throw ShapeMismatch("ragged matrix literal");
    for (int j = 0; j < m.cols(); ++j)
      m.at(i, j) = PadicScalar::from_rational(prime, rows[i][j], rel_prec);
  }
  return m;
}

PMat PMat::column(std::vector<PadicScalar> entries) {
  if (entries.empty()) throw ShapeMismatch("empty column");
  PMat m(entries[0].prime(), static_cast<int>(entries.size()), 1);
  for (size_t i = 0; i < entries.size(); ++i) m.at(static_cast<int>(i), 0) = entries[i];
  return m;
}

PadicScalar& PMat::at(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
const PadicScalar& PMat::at(int r, int c) const {
  return a_[static_cast<size_t>(r) * cols_ + c];
}

PMat PMat::operator+(const PMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix add shapes");
  PMat m(prime_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
  return m;
}

PMat PMat::operator-(const PMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix sub shapes");
  PMat m(prime_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
  return m;
}

PMat PMat::operator*(const PMat& o) const {
  if (cols_ != o.rows_) throw ShapeMismatch("matrix mul shapes");
  PMat m(prime_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < o.cols_; ++j) {
      PadicScalar s = PadicScalar::zero(prime_);
      for (int k = 0; k < cols_; ++k) s = s + at(i, k) * o.at(k, j);
      m.at(i, j) = s;
    }
  return m;
}

PMat PMat::scaled(const PadicScalar& c) const {
  PMat m(prime_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * c;
  return m;
}

PMat PMat::transpose() const {
  PMat m(prime_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
  return m;
}

PMat PMat::col_range(int begin, int end) const {
  PMat m(prime_, rows_, end - begin);
  for (int i = 0; i < rows_; ++i)
    for (int j = begin; j < end; ++j) m.at(i, j - begin) = at(i, j);
  return m;
}

PMat PMat::hcat(const PMat& o) const {
  if (cols_ == 0) return o;
  if (o.cols_ == 0) return *this;
  if (rows_ != o.rows_) throw ShapeMismatch("hcat row counts");
  PMat m(prime_, rows_, cols_ + o.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m.at(i, j) = at(i, j);
    for (int j = 0; j < o.cols_; ++j) m.at(i, cols_ + j) = o.at(i, j);
  }
  return m;
}

std::vector<PadicScalar> PMat::col(int j) const {
  std::vector<PadicScalar> v;
  v.reserve(static_cast<size_t>(rows_));
  for (int i = 0; i < rows_; ++i) v.push_back(at(i, j));
  return v;
}

bool PMat::is_zero_at_precision() const {
  for (const auto& x : a_)
    if (x.known_nonzero()) return false;
  return true;
}

Int PMat::min_val_bound() const {
  Int m = kValInfinity;
  for (const auto& x : a_) m = std::min(m, x.val_lower_bound());
  return m;
}

PMat PMat::kron(const PMat& o) const {
  PMat m(prime_, rows_ * o.rows_, cols_ * o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      for (int k = 0; k < o.rows_; ++k)
        for (int l = 0; l < o.cols_; ++l)
          m.at(i * o.rows_ + k, j * o.cols_ + l) = at(i, j) * o.at(k, l);
  return m;
}

std::string PMat::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << "[";
    for (int j = 0; j < cols_; ++j) {
      if (j) os << ", ";
      os << at(i, j).to_string();
    }
    os << "]\n";
  }
  return os.str();
}

PMat from_rat_matrix(int prime, const std::vector<std::vector<Rat>>& rows, Int rel_prec) {
  return PMat::from_rational_rows(prime, rows, rel_prec);
}

namespace {

// Column echelon data: the span of `basis` equals the input span; `ops`
// records the column operations applied to an identity block underneath,
// which yields kernels.  Pivoting always selects a minimal-valuation entry:
// the p-adic analogue of partial pivoting, so eliminations only divide by
// the "largest" available scalar.
struct Echelon {
  PMat reduced;              // column-reduced copy of the input
  PMat ops;                  // input_cols x input_cols transform, reduced = input * ops
  std::vector<int> pivot_row;   // per surviving column
  std::vector<int> pivot_col;   // surviving column indices in `reduced`
};

Echelon column_echelon(const PMat& input) {
  const int p = input.prime();
  PMat m = input;
  PMat ops = PMat::identity(p, m.cols());
  std::vector<bool> row_used(static_cast<size_t>(m.rows()), false);
  std::vector<bool> col_done(static_cast<size_t>(m.cols()), false);
  std::vector<int> pivot_rows, pivot_cols;
  for (;;) {
    int best_r = -1, best_c = -1;
    Int best_v = kValInfinity;
    for (int r = 0; r < m.rows(); ++r) {
      if (row_used[r]) continue;
      for (int c = 0; c < m.cols(); ++c) {
        if (col_done[c]) continue;
        const PadicScalar& x = m.at(r, c);
        if (x.known_nonzero() && x.valuation() < best_v) {
          best_v = x.valuation();
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_r < 0) break;
    row_used[best_r] = true;
    col_done[best_c] = true;
    pivot_rows.push_back(best_r);
    pivot_cols.push_back(best_c);
    PadicScalar inv = m.at(best_r, best_c).inverse();
    for (int c = 0; c < m.cols(); ++c) {
      if (c == best_c) continue;
      const PadicScalar& x = m.at(best_r, c);
      if (x.is_exact_zero()) continue;
      PadicScalar f = x * inv;
      for (int r = 0; r < m.rows(); ++r)
        m.at(r, c) = m.at(r, c) - f * m.at(r, best_c);
      for (int r = 0; r < ops.rows(); ++r)
        ops.at(r, c) = ops.at(r, c) - f * ops.at(r, best_c);
      // The pivot row entry cancels identically for the true values.
      m.at(best_r, c) = PadicScalar::zero(p);
    }
  }
  return Echelon{std::move(m), std::move(ops), std::move(pivot_rows), std::move(pivot_cols)};
}

}  // namespace

int rank(const PMat& m) {
  return static_cast<int>(column_echelon(m).pivot_col.size());
}

PMat canonical_image(const PMat& m) {
  Echelon e = column_echelon(m);
  const int p = m.prime();
  const int r = static_cast<int>(e.pivot_col.size());
  // Normalize each surviving column by its pivot and clear the other
  // pivot rows, then order columns by pivot row.
  std::vector<int> order(static_cast<size_t>(r));
  for (int i = 0; i < r; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return e.pivot_row[a] < e.pivot_row[b]; });
  PMat out(p, m.rows(), r);
  for (int k = 0; k < r; ++k) {
    const int c = e.pivot_col[order[k]];
    const int pr = e.pivot_row[order[k]];
    PadicScalar inv = e.reduced.at(pr, c).inverse();
    for (int i = 0; i < m.rows(); ++i) out.at(i, k) = e.reduced.at(i, c) * inv;
    out.at(pr, k) = PadicScalar::one(p);
  }
  // Clear pivot rows across other columns (full reduction).
  for (int k = 0; k < r; ++k) {
    const int pr = e.pivot_row[order[k]];
    for (int c2 = 0; c2 < r; ++c2) {
      if (c2 == k) continue;
      const PadicScalar f = out.at(pr, c2);
      if (f.is_exact_zero()) continue;
      for (int i = 0; i < m.rows(); ++i)
        out.at(i, c2) = out.at(i, c2) - f * out.at(i, k);
      out.at(pr, c2) = PadicScalar::zero(p);
    }
  }
  return out;
}

PMat kernel(const PMat& m, int expected_dim) {
  Echelon e = column_echelon(m);
  const int p = m.prime();
  std::vector<int> free_cols;
  std::vector<bool> is_pivot(static_cast<size_t>(m.cols()), false);
  for (int c : e.pivot_col) is_pivot[c] = true;
  for (int c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  PMat out(p, m.cols(), static_cast<int>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k)
    for (int r = 0; r < m.cols(); ++r) out.at(r, static_cast<int>(k)) = e.ops.at(r, free_cols[k]);
  if (expected_dim >= 0 && out.cols() != expected_dim)
    throw PrecisionExhausted("kernel dimension " + std::to_string(out.cols()) +
                             " does not match certified expectation " +
                             std::to_string(expected_dim));
  if (out.cols() == 0) return out;
  return canonical_image(out);
}

bool contains_span(const PMat& big, const PMat& small) {
  if (small.cols() == 0) return true;
  if (big.cols() == 0) return small.is_zero_at_precision();
  return rank(big) == rank(big.hcat(small));
}

bool same_span(const PMat& a, const PMat& b) {
  return contains_span(a, b) && contains_span(b, a);
}

PMat intersect_spans(const PMat& a, const PMat& b) {
  const int p = a.prime();
  if (a.cols() == 0 || b.cols() == 0) return PMat(p, a.rows(), 0);
  PMat stacked = a.hcat(b);
  PMat ker = kernel(stacked);
  // Intersection vectors are a * (top block of kernel columns).
  PMat top(p, a.cols(), ker.cols());
  for (int i = 0; i < a.cols(); ++i)
    for (int j = 0; j < ker.cols(); ++j) top.at(i, j) = ker.at(i, j);
  PMat raw = a * top;
  return canonical_image(raw);
}

PMat sum_spans(const PMat& a, const PMat& b) { return canonical_image(a.hcat(b)); }

PMat solve_in_span(const PMat& a, const PMat& b) {
  const int p = a.prime();
  if (a.rows() != b.rows()) throw ShapeMismatch("solve shapes");
  Echelon e = column_echelon(a);
  if (static_cast<int>(e.pivot_col.size()) != a.cols())
    throw RankDeficient("basis is not independent at tracked precision");
  // Reduce b against the echelon columns, tracking coefficients.
  PMat x(p, a.cols(), b.cols());
  PMat rem = b;
  for (size_t k = 0; k < e.pivot_col.size(); ++k) {
    const int c = e.pivot_col[k];
    const int pr = e.pivot_row[k];
    PadicScalar inv = e.reduced.at(pr, c).inverse();
    for (int j = 0; j < b.cols(); ++j) {
      PadicScalar f = rem.at(pr, j) * inv;
      if (f.is_exact_zero()) continue;
      for (int i = 0; i < b.rows(); ++i)
        rem.at(i, j) = rem.at(i, j) - f * e.reduced.at(i, c);
      rem.at(pr, j) = PadicScalar::zero(p);
      // coefficient on original columns: ops column c times f
      for (int i = 0; i < a.cols(); ++i)
        x.at(i, j) = x.at(i, j) + f * e.ops.at(i, c);
    }
  }
  if (!rem.is_zero_at_precision())
    throw RankDeficient("vector not in span at tracked precision");
  return x;
}

PadicScalar det(const PMat& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("determinant of non-square matrix");
  const int n = m.rows();
  const int p = m.prime();
  if (n == 0) return PadicScalar::one(p);
  // Laplace over the first row; fine at desk scale.
  if (n == 1) return m.at(0, 0);
  PadicScalar acc = PadicScalar::zero(p);
  for (int j = 0; j < n; ++j) {
    if (m.at(0, j).is_exact_zero()) continue;
    PMat sub(p, n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        sub.at(r - 1, cc++) = m.at(r, c);
      }
    }
    PadicScalar term = m.at(0, j) * det(sub);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

PadicPoly charpoly(const PMat& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("charpoly of non-square matrix");
  const int n = m.rows();
  const int p = m.prime();
  if (n == 0) return PadicPoly(p, {PadicScalar::one(p)});
  // Berkowitz: division-free, so precision only flows through + and *.
  // Vector form: coefficients of det(tI - M), degree n, monic.
  std::vector<PadicScalar> poly{PadicScalar::one(p), -m.at(0, 0)};
  for (int k = 1; k < n; ++k) {
    // Toeplitz column for the k-th leading principal submatrix.
    // r = row vector m[k][0..k-1], c = column m[0..k-1][k], A = top-left k x k.
    PMat A(p, k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) A.at(i, j) = m.at(i, j);
    PMat c(p, k, 1);
    for (int i = 0; i < k; ++i) c.at(i, 0) = m.at(i, k);
    PMat r(p, 1, k);
    for (int j = 0; j < k; ++j) r.at(0, j) = m.at(k, j);
    std::vector<PadicScalar> t;  // t[0]=1, t[1]=-m[k][k], t[i+2]=-(r A^i c)
    t.push_back(PadicScalar::one(p));
    t.push_back(-m.at(k, k));
    PMat acc = c;
    for (int i = 0; i + 2 <= k + 1; ++i) {
      PMat rc = r * acc;
      t.push_back(-rc.at(0, 0));
      if (i + 3 <= k + 1) acc = A * acc;
    }
    std::vector<PadicScalar> next(poly.size() + 1, PadicScalar::zero(p));
    for (size_t i = 0; i < t.size(); ++i)
      for (size_t j = 0; j < poly.size(); ++j) {
        if (i + j < next.size()) next[i + j] = next[i + j] + t[i] * poly[j];
      }
    poly = std::move(next);
  }
  // poly holds coefficients highest degree first; flip to low-first.
  std::vector<PadicScalar> low_first(poly.rbegin(), poly.rend());
  return PadicPoly(p, std::move(low_first));
}

std::vector<PadicScalar> pluecker(const PMat& basis) {
  const int n = basis.rows();
  const int k = basis.cols();
  std::vector<PadicScalar> out;
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  const int p = basis.prime();
  for (;;) {
    PMat sub(p, k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub.at(i, j) = basis.at(idx[i], j);
    out.push_back(det(sub));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

namespace {

int top_degree(const std::vector<PadicPoly>& col) {
  int d = -1;
  for (const auto& e : col)
    for (int i = 0; i <= e.degree(); ++i)
      if (e.coeff(i).known_nonzero()) d = std::max(d, i);
  return d;
}

std::vector<PadicPoly> reverse_column(const std::vector<PadicPoly>& col, int p) {
  // t -> 1/t scaled by t^D with a column-wide D: swaps lowest- and
  // highest-degree extraction without changing the spanned family.
  int D = 0;
  for (const auto& e : col) D = std::max(D, e.degree());
  std::vector<PadicPoly> out;
  out.reserve(col.size());
  for (const auto& e : col) {
    std::vector<PadicScalar> cs(static_cast<size_t>(D) + 1, PadicScalar::zero(p));
    for (int i = 0; i <= e.degree(); ++i) cs[static_cast<size_t>(D - i)] = e.coeff(i);
    out.emplace_back(p, std::move(cs));
  }
  return out;
}

}  // namespace

PMat grassmann_limit(std::vector<std::vector<PadicPoly>> cols, bool extreme_high) {
  if (cols.empty()) throw RankDeficient("empty column family");
  const int p = cols[0][0].prime();
  const int n = static_cast<int>(cols[0].size());
  const int k = static_cast<int>(cols.size());
  if (!extreme_high)
    for (auto& col : cols) col = reverse_column(col, p);
  for (int guard = 0; guard < 4096; ++guard) {
    std::vector<int> deg(static_cast<size_t>(k));
    PMat extreme(p, n, k);
    for (int j = 0; j < k; ++j) {
      deg[j] = top_degree(cols[j]);
      if (deg[j] < 0) throw RankDeficient("column vanished during limit reduction");
      for (int i = 0; i < n; ++i) extreme.at(i, j) = cols[j][i].coeff(deg[j]);
    }
    if (rank(extreme) == k) return canonical_image(extreme);
    // Dependence among the leading vectors: fold the supporting columns into
    // the one of largest degree, which strictly lowers its degree.
    PMat ker = kernel(extreme);
    std::vector<PadicScalar> c = ker.col(0);
    int target = -1;
    for (int j = 0; j < k; ++j) {
      if (!c[j].known_nonzero()) continue;
      if (target < 0 || deg[j] > deg[target]) target = j;
    }
    if (target < 0) throw PrecisionExhausted("limit reduction lost all pivots");
    const PadicScalar ct_inv = c[target].inverse();
    std::vector<PadicPoly> combo(static_cast<size_t>(n), PadicPoly(p));
    for (int j = 0; j < k; ++j) {
      if (!c[j].known_nonzero()) continue;
      const int shift = deg[target] - deg[j];
      for (int i = 0; i < n; ++i)
        combo[i] = combo[i] + cols[j][i].scaled(c[j] * ct_inv).shifted_var(shift);
    }
    // The leading coefficients cancel identically for the true values.
    for (int i = 0; i < n; ++i) {
      std::vector<PadicScalar> cs(combo[i].coeffs());
      if (static_cast<int>(cs.size()) > deg[target])
        cs[static_cast<size_t>(deg[target])] = PadicScalar::zero(p);
      combo[i] = PadicPoly(p, std::move(cs));
    }
    cols[static_cast<size_t>(target)] = std::move(combo);
  }
  throw PrecisionExhausted("limit reduction did not terminate");
}

std::string span_key(const PMat& m, Int digits) {
  PMat c = m.cols() ? canonical_image(m) : m;
  std::ostringstream os;
  os << c.rows() << "x" << c.cols() << ":";
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) {
      const PadicScalar& x = c.at(i, j);
      if (x.is_exact_zero()) {
        os << "z;";
      } else if (!x.known_nonzero()) {
        os << "o;";
      } else {
        PadicScalar t = x.capped(std::min(x.abs_precision(), x.valuation() + digits));
        os << t.valuation() << "." << t.unit().get_str() << ";";
      }
    }
  return os.str();
}

}  // namespace phodge

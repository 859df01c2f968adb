#pragma once

#include <random>
#include <vector>

#include "phodge/filtration.hpp"
#include "phodge/isocrystal.hpp"

namespace phodge::testing {

// Integer shear product: invertible with determinant +-1, entries small.
inline PMat random_unimodular(int prime, int n, std::mt19937_64& rng, int rounds = 6) {
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

// Conjugated diagonal Frobenius with prescribed eigenvalue valuations.
inline Isocrystal random_isocrystal(int prime, const std::vector<Int>& vals,
                                    std::mt19937_64& rng) {
  const int n = static_cast<int>(vals.size());
  std::uniform_int_distribution<int> unit(1, prime - 1);
  PMat d(prime, n, n);
  for (int i = 0; i < n; ++i)
    d.at(i, i) = PadicScalar::p_power(prime, vals[i]) *
                 PadicScalar::from_int(prime, unit(rng));
  PMat g = random_unimodular(prime, n, rng);
  PMat ginv = solve_in_span(g, PMat::identity(prime, n));
  return Isocrystal(prime, g * d * ginv);
}

// Random full flag with the given descending jumps (prefix spans of a
// random unimodular frame).
inline FilteredSpace random_flag(int prime, int n, std::vector<Rat> jumps,
                                 std::mt19937_64& rng) {
  PMat g = random_unimodular(prime, n, rng);
  std::vector<FilStep> steps;
  const int k = static_cast<int>(jumps.size());
  for (int i = 0; i < k; ++i) {
    int dim = (i + 1 == k) ? n : (n * (i + 1)) / k;
    if (dim == 0) dim = 1;
    steps.push_back(FilStep{jumps[i], g.col_range(0, dim)});
  }
  // Deduplicate dims while keeping the deepest jump.
  std::vector<FilStep> out;
  for (auto& st : steps) {
    if (!out.empty() && out.back().basis.cols() == st.basis.cols()) continue;
    out.push_back(st);
  }
  return FilteredSpace(prime, n, std::move(out));
}

inline std::vector<Rat> descending_jumps(std::mt19937_64& rng, int count, int span = 3) {
  std::uniform_int_distribution<int> step(1, span);
  std::uniform_int_distribution<int> start(-span, span);
  std::vector<Rat> jumps;
  int cur = start(rng) + count * span;
  for (int i = 0; i < count; ++i) {
    jumps.emplace_back(cur);
    cur -= step(rng);
  }
  return jumps;
}

inline PMat rational_matrix(int prime, std::vector<std::vector<long>> rows) {
  std::vector<std::vector<Rat>> q;
  for (auto& r : rows) {
    q.emplace_back();
    for (long x : r) q.back().emplace_back(x);
  }
  return PMat::from_rational_rows(prime, q);
}

}  // namespace phodge::testing

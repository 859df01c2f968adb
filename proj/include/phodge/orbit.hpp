#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phodge/filtration.hpp"

namespace phodge {

class NilpotentOperator {
 public:
  explicit NilpotentOperator(PMat matrix, std::optional<Int> twist = std::nullopt);

  const PMat& matrix() const { return matrix_; }
  int dim() const { return matrix_.rows(); }
  int prime() const { return matrix_.prime(); }
  int nilpotency_index() const { return index_; }
  bool is_zero() const { return index_ == 0; }
  const std::optional<Int>& twist() const { return twist_; }

 private:
  PMat matrix_;
  int index_;  // least k with N^k = 0 (0 for the zero operator)
  std::optional<Int> twist_;
};

struct Sl2Triple {
  PMat lowering;    // X- = N
  PMat semisimple;  // H
  PMat raising;     // X+
};

/// Local normal form of a period map: base flag F_0 and a polynomial
/// family n(l) of matrices in l = log kappa_z, applied as exp(n(l)*l)F_0.
class PeriodMapModel {
 public:
  PeriodMapModel(FilteredSpace base, std::vector<PMat> sen_coeffs,
                 Int domain_radius_exponent);

  const FilteredSpace& base() const { return base_; }
  const std::vector<PMat>& sen_coeffs() const { return sen_coeffs_; }
  Int domain_radius_exponent() const { return radius_; }
  int prime() const { return base_.prime(); }
  int dim() const { return base_.ambient_dim(); }

  /// Sen matrix n(l) evaluated at a scalar.
  PMat sen_at(const PadicScalar& l) const;

 private:
  FilteredSpace base_;
  std::vector<PMat> sen_coeffs_;
  Int radius_;
};

/// Increasing filtration M_i with N M_i inside M_{i-2}.
struct WeightStep {
  Int index;
  PMat basis;
};
struct WeightFiltration {
  std::vector<WeightStep> steps;  // strictly increasing indices and dims
};

struct PhiNCompat {
  bool any_r = false;           // N = 0: compatible for every r
  std::optional<Int> r;         // the unique positive twist, if one exists
  bool compatible() const { return any_r || r.has_value(); }
};

/// The unique r > 0 with N Phi = p^r Phi N, if any.
PhiNCompat phi_n_compat(const NilpotentOperator& N, const Isocrystal& E);

/// exp(sum t_i N_i) F_0 with the exact finite exponential polynomial.
FilteredSpace orbit_eval(const std::vector<NilpotentOperator>& Ns,
                         const std::vector<PadicScalar>& ts, const FilteredSpace& F0);
FilteredSpace orbit_eval(const NilpotentOperator& N, const PadicScalar& t,
                         const FilteredSpace& F0);

/// Limit of exp(tN) F_0 with t treated formally; val(t) -> -infinity keeps
/// highest powers, val(t) -> +infinity lowest.
FilteredSpace orbit_limit(const NilpotentOperator& N, const FilteredSpace& F0,
                          bool val_to_minus_infinity = true);

struct OrbitVerdict {
  bool is_orbit = false;
  PhiNCompat compat;
  std::optional<FilteredSpace> limit;
  SemistabilityVerdict semistability;
};

/// Definition-6.2 check: twist compatibility plus semistability of the
/// orbit limit.
OrbitVerdict nilpotent_orbit_check(const NilpotentOperator& N, const Isocrystal& E,
                                   const FilteredSpace& F0,
                                   const std::vector<PMat>& generators = {});

/// exp(N l) exp(n(l) l) F_0 at l = log(1+z); the Sen factor is a certified
/// truncation of the matrix exponential.
FilteredSpace twisted_orbit_eval(const NilpotentOperator& N, const PeriodMapModel& model,
                                 const PadicScalar& z);

struct DecayRow {
  Int val;
  FlagDistance dist;
};
struct DecayReport {
  std::vector<DecayRow> rows;
  std::optional<Rat> fitted_exponent;  // least-squares slope of exponent vs val
};

DecayReport distance_decay_report(const NilpotentOperator& N, const PeriodMapModel& model,
                                  const std::vector<Int>& sample_vals);

struct ConjugationResult {
  bool converged = false;
  PMat value;            // the limit when it exists
  int diverging_power = 0;
  PMat coefficient;      // lowest diverging coefficient otherwise
};

/// Limit of exp(tN) g exp(-tN) as the parameter degenerates; divergence is
/// reported, not thrown.
ConjugationResult conjugation_limit(const NilpotentOperator& N, const PMat& g);

/// Jordan-chain construction of an sl2-triple through a nonzero nilpotent.
Sl2Triple jacobson_morozov(const NilpotentOperator& N);

/// The unique increasing filtration with N M_i in M_{i-2} and N^k an
/// isomorphism gr_k -> gr_{-k}; built from the sl2 weight grading.
WeightFiltration monodromy_weight_filtration(const NilpotentOperator& N);

struct MixedGradedResult {
  bool ok = true;
  std::vector<std::string> notes;  // one line per graded piece
};

/// Definition-9.2 style check: each P-graded piece carries a valid induced
/// filtration; with per-weight isocrystals supplied, also semistable.
MixedGradedResult mixed_graded_check(const WeightFiltration& P, const FilteredSpace& F,
                                     const std::vector<Isocrystal>& per_weight = {});

struct OrbitInstance {
  PMat N;
  FilteredSpace F0;
  PhiNCompat compat;
  FilteredSpace limit;
  bool semistable = false;
  bool enumeration_complete = true;
};

struct OrbitSearchConfig {
  std::vector<Rat> pool;       // scalar entries tried in N and flag vectors
  long budget = 200000;        // candidate cap before BudgetExceeded
};

/// Exhaustive harness: all pool-valued nilpotent N compatible with E and
/// pool-built flags with the given jump multiset, returning the instances
/// whose orbit check succeeds (each re-verified before inclusion).
std::vector<OrbitInstance> orbit_search(const Isocrystal& E,
                                        const std::vector<Rat>& jump_multiset,
                                        const OrbitSearchConfig& config);

}  // namespace phodge

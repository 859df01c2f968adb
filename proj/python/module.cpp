#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "phodge/fixture.hpp"
#include "phodge/verify.hpp"

namespace py = pybind11;
using namespace phodge;

namespace {

// The python surface works with fixture-style JSON strings throughout, so
// every value stays exact on the way in and out.
Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("bad JSON: ") + e.what());
  }
}

Fixture fixture_of(const std::string& text) { return load_fixture(parse(text)); }

std::string dump(const Json& j) { return j.dump(); }

PMat matrix_of(const std::string& text, int p, Int prec) {
  return matrix_from_json(parse(text), p, prec);
}

void register_errors(py::module_& m) {
  static py::exception<Error> base(m, "PhodgeError");
  py::register_exception_translator([](std::exception_ptr ptr) {
    try {
      if (ptr) std::rethrow_exception(ptr);
    } catch (const Error& e) {
      base(e.what());
    }
  });
}

}  // namespace

PYBIND11_MODULE(_phodge, m) {
  m.doc() = "exact p-adic isocrystals, filtrations and nilpotent orbits";
  register_errors(m);

  m.def("newton_polygon",
        [](const std::string& fixture, const std::string& name) {
          auto fx = fixture_of(fixture);
          return dump(newton_to_json(newton_polygon(fx.isocrystal(name))));
        },
        py::arg("fixture_json"), py::arg("name"));

  m.def("slope_decomposition",
        [](const std::string& fixture, const std::string& name) {
          auto fx = fixture_of(fixture);
          Json arr = Json::array();
          for (const auto& part : slope_decomposition(fx.isocrystal(name))) {
            Json pj;
            pj["slope"] = rat_to_string(part.slope);
            pj["dim"] = part.basis.cols();
            pj["basis"] = matrix_to_json(part.basis);
            arr.push_back(pj);
          }
          return dump(arr);
        },
        py::arg("fixture_json"), py::arg("name"));

  m.def("simple_isocrystal_frobenius",
        [](int p, long r, long s) {
          return dump(matrix_to_json(simple_isocrystal(p, r, s).frobenius()));
        },
        py::arg("p"), py::arg("r"), py::arg("s"));

  m.def("hn_filtration",
        [](const std::string& fixture, const std::string& filtration,
           const std::string& isocrystal) {
          auto fx = fixture_of(fixture);
          Json arr = Json::array();
          for (const auto& st :
               hn_filtration(fx.ambient_of(filtration, isocrystal),
                             fx.filtration(filtration))) {
            Json sj;
            sj["dim"] = st.basis.cols();
            sj["slope"] = rat_to_string(st.slope);
            sj["basis"] = matrix_to_json(st.basis);
            arr.push_back(sj);
          }
          return dump(arr);
        },
        py::arg("fixture_json"), py::arg("filtration"), py::arg("isocrystal") = "");

  m.def("is_semistable",
        [](const std::string& fixture, const std::string& filtration,
           const std::string& isocrystal) {
          auto fx = fixture_of(fixture);
          auto verdict = is_semistable(fx.ambient_of(filtration, isocrystal),
                                       fx.filtration(filtration));
          Json j;
          j["semistable"] = verdict.semistable;
          j["enumeration"] = verdict.enumeration_complete ? "complete" : "partial";
          j["ambient_slope"] = rat_to_string(verdict.ambient_slope);
          if (verdict.witness) {
            j["witness_slope"] = rat_to_string(verdict.witness_slope);
            j["witness"] = matrix_to_json(*verdict.witness);
          }
          return dump(j);
        },
        py::arg("fixture_json"), py::arg("filtration"), py::arg("isocrystal") = "");

  m.def("filtration_pairing",
        [](const std::string& fixture, const std::string& a, const std::string& b) {
          auto fx = fixture_of(fixture);
          return rat_to_string(filtration_pairing(fx.filtration(a), fx.filtration(b)));
        },
        py::arg("fixture_json"), py::arg("a"), py::arg("b"));

  m.def("hm_invariant",
        [](const std::string& fixture, const std::string& filtration,
           const std::string& subgroup) {
          auto fx = fixture_of(fixture);
          return rat_to_string(hm_invariant(fx.filtration(filtration),
                                            fx.subgroup(subgroup)));
        },
        py::arg("fixture_json"), py::arg("filtration"), py::arg("subgroup"));

  m.def("ps_limit",
        [](const std::string& fixture, const std::string& subgroup,
           const std::string& filtration, bool to_zero) {
          auto fx = fixture_of(fixture);
          return dump(filtration_to_json(
              ps_limit(fx.subgroup(subgroup), fx.filtration(filtration), to_zero)));
        },
        py::arg("fixture_json"), py::arg("subgroup"), py::arg("filtration"),
        py::arg("to_zero") = true);

  m.def("orbit_eval",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& filtration, const std::string& t) {
          auto fx = fixture_of(fixture);
          auto tval = scalar_from_json(Json(t), fx.prime, fx.precision);
          return dump(filtration_to_json(
              orbit_eval(fx.nilpotent(nilpotent), tval, fx.filtration(filtration))));
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("filtration"),
        py::arg("t"));

  m.def("orbit_limit",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& filtration, bool val_to_minus_infinity) {
          auto fx = fixture_of(fixture);
          return dump(filtration_to_json(orbit_limit(fx.nilpotent(nilpotent),
                                                     fx.filtration(filtration),
                                                     val_to_minus_infinity)));
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("filtration"),
        py::arg("val_to_minus_infinity") = true);

  m.def("orbit_check",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& filtration, const std::string& isocrystal) {
          auto fx = fixture_of(fixture);
          auto verdict = nilpotent_orbit_check(fx.nilpotent(nilpotent),
                                               fx.ambient_of(filtration, isocrystal),
                                               fx.filtration(filtration));
          Json j;
          j["orbit"] = verdict.is_orbit;
          j["twist"] = verdict.compat.any_r
                           ? Json("any")
                           : (verdict.compat.r ? Json(static_cast<long>(*verdict.compat.r))
                                               : Json("none"));
          j["limit"] = filtration_to_json(*verdict.limit);
          j["limit_semistable"] = verdict.semistability.semistable;
          return dump(j);
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("filtration"),
        py::arg("isocrystal") = "");

  m.def("sl2_triple",
        [](const std::string& fixture, const std::string& nilpotent) {
          auto fx = fixture_of(fixture);
          auto triple = jacobson_morozov(fx.nilpotent(nilpotent));
          Json j;
          j["H"] = matrix_to_json(triple.semisimple);
          j["X+"] = matrix_to_json(triple.raising);
          j["X-"] = matrix_to_json(triple.lowering);
          return dump(j);
        },
        py::arg("fixture_json"), py::arg("nilpotent"));

  m.def("weight_filtration",
        [](const std::string& fixture, const std::string& nilpotent) {
          auto fx = fixture_of(fixture);
          Json arr = Json::array();
          for (const auto& st : monodromy_weight_filtration(fx.nilpotent(nilpotent)).steps) {
            Json sj;
            sj["index"] = static_cast<long>(st.index);
            sj["dim"] = st.basis.cols();
            sj["basis"] = matrix_to_json(st.basis);
            arr.push_back(sj);
          }
          return dump(arr);
        },
        py::arg("fixture_json"), py::arg("nilpotent"));

  m.def("flag_distance",
        [](const std::string& fixture, const std::string& a, const std::string& b) {
          auto fx = fixture_of(fixture);
          return flag_distance(fx.filtration(a), fx.filtration(b)).to_string();
        },
        py::arg("fixture_json"), py::arg("a"), py::arg("b"));

  m.def("padic_exp_str",
        [](int p, const std::string& x, Int precision) {
          return padic_exp(scalar_from_json(Json(x), p, precision)).to_string();
        },
        py::arg("p"), py::arg("x"), py::arg("precision") = kDefaultRelPrec);

  m.def("padic_log_str",
        [](int p, const std::string& x, Int precision) {
          return padic_log(scalar_from_json(Json(x), p, precision)).to_string();
        },
        py::arg("p"), py::arg("x"), py::arg("precision") = kDefaultRelPrec);

  m.def("binomial_poly_str",
        [](int n) { return binomial_poly(n).to_string(); }, py::arg("n"));

  m.def("gauss_norm",
        [](int p, const std::string& coeffs_csv, long n, const std::string& omega) {
          std::vector<Rat> cs;
          std::stringstream ss(coeffs_csv);
          std::string tok;
          while (std::getline(ss, tok, ',')) cs.push_back(rat_from_string(tok));
          auto v = gauss_norm_val(RatPoly(cs), p, Rat(0), n, rat_from_string(omega));
          return v ? rat_to_string(*v) : std::string("infinity");
        },
        py::arg("p"), py::arg("coeffs_csv"), py::arg("n"), py::arg("omega") = "0");

  m.def("mahler_expand",
        [](int p, const std::string& coeffs_csv) {
          std::vector<Rat> cs;
          std::stringstream ss(coeffs_csv);
          std::string tok;
          while (std::getline(ss, tok, ',')) cs.push_back(rat_from_string(tok));
          auto series = mahler_expand(RatPoly(cs), p);
          Json arr = Json::array();
          for (const auto& c : series.coeffs()) arr.push_back(scalar_to_json(c));
          return dump(arr);
        },
        py::arg("p"), py::arg("coeffs_csv"));

  m.def("eval_character",
        [](int p, const std::string& z, const std::string& x, Int precision) {
          CharacterPoint pt(scalar_from_json(Json(z), p, precision));
          return dump(scalar_to_json(
              eval_character(pt, scalar_from_json(Json(x), p, precision))));
        },
        py::arg("p"), py::arg("z"), py::arg("x"), py::arg("precision") = kDefaultRelPrec);

  m.def("verify",
        [](const std::string& suite, unsigned long seed) {
          std::vector<VerifyReport> reports;
          if (suite == "all")
            reports = verify_all(seed);
          else
            reports.push_back(verify_suite(suite, seed));
          Json arr = Json::array();
          bool ok = true;
          for (const auto& rep : reports) {
            Json rj;
            rj["suite"] = rep.suite;
            Json lines = Json::array();
            for (const auto& line : rep.lines) {
              Json lj;
              lj["name"] = line.name;
              lj["pass"] = line.pass;
              lj["details"] = line.details;
              lines.push_back(lj);
              ok = ok && line.pass;
            }
            rj["lines"] = lines;
            arr.push_back(rj);
          }
          Json j;
          j["suites"] = arr;
          j["ok"] = ok;
          return dump(j);
        },
        py::arg("suite") = "all", py::arg("seed") = 0UL);

  m.def("conjugation_limit",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& g_matrix) {
          auto fx = fixture_of(fixture);
          PMat g = matrix_of(g_matrix, fx.prime, fx.precision);
          auto res = conjugation_limit(fx.nilpotent(nilpotent), g);
          Json j;
          j["converged"] = res.converged;
          if (res.converged) {
            j["value"] = matrix_to_json(res.value);
          } else {
            j["diverging_power"] = res.diverging_power;
            j["coefficient"] = matrix_to_json(res.coefficient);
          }
          return dump(j);
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("g_matrix_json"));

  m.def("newton_leq",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
          std::vector<Rat> ra, rb;
          for (const auto& s : a) ra.push_back(rat_from_string(s));
          for (const auto& s : b) rb.push_back(rat_from_string(s));
          return newton_leq(NewtonVector::from_slopes(ra), NewtonVector::from_slopes(rb));
        },
        py::arg("lhs_slopes"), py::arg("rhs_slopes"));

  m.def("is_admissible_newton",
        [](const std::vector<std::string>& slopes) {
          std::vector<Rat> rs;
          for (const auto& s : slopes) rs.push_back(rat_from_string(s));
          return is_admissible_newton(NewtonVector::from_slopes(rs));
        },
        py::arg("slopes"));

  m.def("siegel_stratum_dimension",
        [](const std::vector<std::string>& slopes, int g) {
          std::vector<Rat> rs;
          for (const auto& s : slopes) rs.push_back(rat_from_string(s));
          return siegel_stratum_dimension(NewtonVector::from_slopes(rs), g);
        },
        py::arg("slopes"), py::arg("g"));

  m.def("twisted_orbit_eval",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& model, const std::string& z) {
          auto fx = fixture_of(fixture);
          auto zval = scalar_from_json(Json(z), fx.prime, fx.precision);
          return dump(filtration_to_json(
              twisted_orbit_eval(fx.nilpotent(nilpotent), fx.model(model), zval)));
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("model"), py::arg("z"));

  m.def("distance_decay_report",
        [](const std::string& fixture, const std::string& nilpotent,
           const std::string& model, const std::vector<long>& sample_vals) {
          auto fx = fixture_of(fixture);
          std::vector<Int> vals(sample_vals.begin(), sample_vals.end());
          auto rep = distance_decay_report(fx.nilpotent(nilpotent), fx.model(model), vals);
          Json j;
          Json rows = Json::array();
          for (const auto& row : rep.rows) {
            Json rj;
            rj["val"] = static_cast<long>(row.val);
            rj["dist"] = row.dist.to_string();
            rows.push_back(rj);
          }
          j["rows"] = rows;
          if (rep.fitted_exponent) j["fit"] = rat_to_string(*rep.fitted_exponent);
          return dump(j);
        },
        py::arg("fixture_json"), py::arg("nilpotent"), py::arg("model"),
        py::arg("sample_vals"));

  m.def("orbit_search",
        [](const std::string& fixture, const std::string& isocrystal,
           const std::vector<std::string>& jumps, const std::vector<std::string>& pool,
           long budget) {
          auto fx = fixture_of(fixture);
          OrbitSearchConfig config;
          for (const auto& s : pool) config.pool.push_back(rat_from_string(s));
          config.budget = budget;
          std::vector<Rat> js;
          for (const auto& s : jumps) js.push_back(rat_from_string(s));
          Json arr = Json::array();
          for (const auto& inst : orbit_search(fx.isocrystal(isocrystal), js, config)) {
            Json rec;
            rec["N"] = matrix_to_json(inst.N);
            rec["F0"] = filtration_to_json(inst.F0);
            rec["r"] = inst.compat.any_r ? Json("any")
                                         : Json(static_cast<long>(*inst.compat.r));
            rec["limit"] = filtration_to_json(inst.limit);
            rec["semistable"] = inst.semistable;
            arr.push_back(rec);
          }
          return dump(arr);
        },
        py::arg("fixture_json"), py::arg("isocrystal"), py::arg("jumps"),
        py::arg("pool"), py::arg("budget") = 200000L);

  m.def("estimate_report",
        [](int p, int l_max, long n_max, const std::string& omega) {
          Rat om = omega.empty() ? Rat(1, p - 1) : rat_from_string(omega);
          auto rep = estimate_report(p, l_max, n_max, om);
          Json j;
          j["p"] = rep.prime;
          j["omega"] = rat_to_string(rep.omega);
          j["bound_holds"] = rep.bound_holds;
          Json rows = Json::array();
          for (const auto& row : rep.rows) {
            Json rj;
            rj["l"] = row.l;
            rj["n"] = static_cast<long>(row.n);
            rj["valuation"] = rat_to_string(row.norm_valuation);
            rows.push_back(rj);
          }
          j["rows"] = rows;
          return dump(j);
        },
        py::arg("p"), py::arg("l_max") = 12, py::arg("n_max") = 8,
        py::arg("omega") = "");
}

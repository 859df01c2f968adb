#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phodge/fixture.hpp"
#include "phodge/verify.hpp"

using namespace phodge;

namespace {

struct Options {
  int prime = 5;
  bool prime_set = false;
  Int precision = kDefaultRelPrec;
  bool precision_set = false;
  unsigned long seed = 0;
  bool json = false;
  std::string results_path;
};

std::string scalar_text(const PadicScalar& x) { return x.to_string(); }

void print_matrix(std::ostream& os, const PMat& m, const std::string& indent) {
  for (int i = 0; i < m.rows(); ++i) {
    os << indent << "[";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << scalar_text(m.at(i, j));
    }
    os << "]\n";
  }
}

void print_filtration(std::ostream& os, const FilteredSpace& F) {
  for (const auto& st : F.steps()) {
    os << "F^" << rat_to_string(st.jump) << ": dim " << st.basis.cols() << "\n";
    print_matrix(os, st.basis, "  ");
  }
}

std::vector<Rat> parse_rat_list(const std::string& csv) {
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(rat_from_string(tok));
  }
  if (out.empty()) throw ValidationError("empty rational list");
  return out;
}

Fixture load_with_overrides(const std::string& path, const Options& opt) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fixture file '" + path + "'");
  Json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("fixture parse error: ") + e.what());
  }
  if (opt.precision_set) doc["precision"] = static_cast<long>(opt.precision);
  if (opt.prime_set && doc.contains("p") && doc.at("p").get<int>() != opt.prime)
    throw ValidationError("--prime conflicts with the fixture's prime");
  return load_fixture(doc);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"exact p-adic isocrystal, filtration and orbit calculator"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  if (const char* env = std::getenv("PHODGE_PRECISION")) {
    opt.precision = std::strtol(env, nullptr, 10);
    opt.precision_set = true;
  }
  if (const char* env = std::getenv("PHODGE_SEED"))
    opt.seed = std::strtoul(env, nullptr, 10);
  auto* po = app.add_option("--prime", opt.prime, "prime for fixture-less subcommands");
  auto* co = app.add_option("--precision", opt.precision, "working precision in digits");
  app.add_option("--seed", opt.seed, "seed for the verification suites");
  app.add_flag("--json", opt.json, "emit JSON instead of text");
  app.add_option("--results", opt.results_path, "append-only results file (orbit search)");

  std::ostringstream out;
  int exit_code = 0;

  auto refresh = [&] {
    opt.prime_set = po->count() > 0;
    if (co->count() > 0) opt.precision_set = true;
  };

  // newton
  std::string fx_path, name_a, name_b, name_c;
  auto* newton = app.add_subcommand("newton", "Newton polygon of an isocrystal");
  newton->add_option("fixture", fx_path)->required();
  newton->add_option("name", name_a)->required();
  newton->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto nu = newton_polygon(fx.isocrystal(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "newton";
      j["object"] = name_a;
      j["slopes"] = newton_to_json(nu);
      j["admissible"] = is_admissible_newton(nu);
      out << j.dump(2) << "\n";
    } else {
      out << "slopes: " << nu.to_string() << "\n";
      out << "admissible: " << (is_admissible_newton(nu) ? "true" : "false") << "\n";
    }
  });

  // decompose
  auto* decompose = app.add_subcommand("decompose", "slope decomposition");
  decompose->add_option("fixture", fx_path)->required();
  decompose->add_option("name", name_a)->required();
  decompose->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto parts = slope_decomposition(fx.isocrystal(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "decompose";
      j["object"] = name_a;
      Json arr = Json::array();
      for (const auto& part : parts) {
        Json pj;
        pj["slope"] = rat_to_string(part.slope);
        pj["dim"] = part.basis.cols();
        pj["basis"] = matrix_to_json(part.basis);
        arr.push_back(pj);
      }
      j["parts"] = arr;
      out << j.dump(2) << "\n";
    } else {
      for (const auto& part : parts) {
        out << "slope " << rat_to_string(part.slope) << ": dim " << part.basis.cols()
            << "\n";
        print_matrix(out, part.basis, "  ");
      }
    }
  });

  // hn
  auto* hn = app.add_subcommand("hn", "Harder-Narasimhan filtration");
  hn->add_option("fixture", fx_path)->required();
  hn->add_option("filtration", name_a)->required();
  hn->add_option("isocrystal", name_b, "explicit ambient (defaults to the declared one)");
  hn->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto steps = hn_filtration(fx.ambient_of(name_a, name_b), fx.filtration(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "hn";
      Json arr = Json::array();
      for (const auto& st : steps) {
        Json sj;
        sj["dim"] = st.basis.cols();
        sj["slope"] = rat_to_string(st.slope);
        sj["basis"] = matrix_to_json(st.basis);
        arr.push_back(sj);
      }
      j["steps"] = arr;
      out << j.dump(2) << "\n";
    } else {
      int i = 1;
      for (const auto& st : steps) {
        out << "step " << i++ << ": dim " << st.basis.cols() << ", slope "
            << rat_to_string(st.slope) << "\n";
        print_matrix(out, st.basis, "  ");
      }
    }
  });

  // semistable
  bool assert_flag = false;
  auto* semi = app.add_subcommand("semistable", "brute-force semistability verdict");
  semi->add_option("fixture", fx_path)->required();
  semi->add_option("filtration", name_a)->required();
  semi->add_option("isocrystal", name_b, "explicit ambient (defaults to the declared one)");
  semi->add_flag("--assert", assert_flag, "exit 1 when unstable");
  semi->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto verdict = is_semistable(fx.ambient_of(name_a, name_b), fx.filtration(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "semistable";
      j["semistable"] = verdict.semistable;
      j["enumeration"] = verdict.enumeration_complete ? "complete" : "partial";
      j["ambient_slope"] = rat_to_string(verdict.ambient_slope);
      if (verdict.witness) {
        j["witness_slope"] = rat_to_string(verdict.witness_slope);
        j["witness"] = matrix_to_json(*verdict.witness);
      }
      out << j.dump(2) << "\n";
    } else {
      out << "semistable: " << (verdict.semistable ? "true" : "false") << "\n";
      out << "enumeration: " << (verdict.enumeration_complete ? "complete" : "partial")
          << "\n";
      out << "ambient slope: " << rat_to_string(verdict.ambient_slope) << "\n";
      if (verdict.witness) {
        out << "witness slope: " << rat_to_string(verdict.witness_slope) << "\n";
        out << "witness basis:\n";
        print_matrix(out, *verdict.witness, "  ");
      }
    }
    if (assert_flag && !verdict.semistable) exit_code = 1;
  });

  // pairing
  auto* pairing = app.add_subcommand("pairing", "filtration pairing");
  pairing->add_option("fixture", fx_path)->required();
  pairing->add_option("first", name_a)->required();
  pairing->add_option("second", name_b)->required();
  pairing->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    Rat value = filtration_pairing(fx.filtration(name_a), fx.filtration(name_b));
    if (opt.json) {
      Json j;
      j["op"] = "pairing";
      j["value"] = rat_to_string(value);
      out << j.dump(2) << "\n";
    } else {
      out << "pairing: " << rat_to_string(value) << "\n";
    }
  });

  // hm
  auto* hm = app.add_subcommand("hm", "Hilbert-Mumford invariant");
  hm->add_option("fixture", fx_path)->required();
  hm->add_option("filtration", name_a)->required();
  hm->add_option("subgroup", name_b)->required();
  hm->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    Rat value = hm_invariant(fx.filtration(name_a), fx.subgroup(name_b));
    if (opt.json) {
      Json j;
      j["op"] = "hm";
      j["value"] = rat_to_string(value);
      out << j.dump(2) << "\n";
    } else {
      out << "hm: " << rat_to_string(value) << "\n";
    }
  });

  // ps-limit
  std::string direction = "to_zero";
  auto* pslim = app.add_subcommand("ps-limit", "one-parameter-subgroup limit of a flag");
  pslim->add_option("fixture", fx_path)->required();
  pslim->add_option("subgroup", name_a)->required();
  pslim->add_option("filtration", name_b)->required();
  pslim->add_option("--direction", direction)
      ->check(CLI::IsMember({"to_zero", "to_infinity"}));
  pslim->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto lim = ps_limit(fx.subgroup(name_a), fx.filtration(name_b),
                        direction == "to_zero");
    if (opt.json) {
      Json j;
      j["op"] = "ps-limit";
      j["filtration"] = filtration_to_json(lim);
      out << j.dump(2) << "\n";
    } else {
      print_filtration(out, lim);
    }
  });

  // orbit family
  auto* orbit = app.add_subcommand("orbit", "nilpotent orbit operations");
  orbit->require_subcommand(1);
  std::string t_literal = "0";
  auto* oeval = orbit->add_subcommand("eval", "transport a flag by exp(t N)");
  oeval->add_option("fixture", fx_path)->required();
  oeval->add_option("nilpotent", name_a)->required();
  oeval->add_option("filtration", name_b)->required();
  oeval->add_option("--t", t_literal, "parameter value (rational literal)");
  oeval->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto t = scalar_from_json(Json(t_literal), fx.prime, fx.precision);
    auto moved = orbit_eval(fx.nilpotent(name_a), t, fx.filtration(name_b));
    if (opt.json) {
      Json j;
      j["op"] = "orbit-eval";
      j["filtration"] = filtration_to_json(moved);
      out << j.dump(2) << "\n";
    } else {
      print_filtration(out, moved);
    }
  });

  std::string odir = "val-minus";
  auto* olim = orbit->add_subcommand("limit", "leading-term limit of exp(t N) F");
  olim->add_option("fixture", fx_path)->required();
  olim->add_option("nilpotent", name_a)->required();
  olim->add_option("filtration", name_b)->required();
  olim->add_option("--direction", odir)->check(CLI::IsMember({"val-minus", "val-plus"}));
  olim->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto lim = orbit_limit(fx.nilpotent(name_a), fx.filtration(name_b),
                           odir == "val-minus");
    if (opt.json) {
      Json j;
      j["op"] = "orbit-limit";
      j["filtration"] = filtration_to_json(lim);
      out << j.dump(2) << "\n";
    } else {
      print_filtration(out, lim);
    }
  });

  auto* ocheck = orbit->add_subcommand("check", "Definition-6.2 orbit verdict");
  ocheck->add_option("fixture", fx_path)->required();
  ocheck->add_option("nilpotent", name_a)->required();
  ocheck->add_option("filtration", name_b)->required();
  ocheck->add_option("isocrystal", name_c, "explicit ambient (defaults to the declared one)");
  ocheck->add_flag("--assert", assert_flag, "exit 1 when the check fails");
  ocheck->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto verdict = nilpotent_orbit_check(fx.nilpotent(name_a), fx.ambient_of(name_b, name_c),
                                         fx.filtration(name_b));
    std::string twist = verdict.compat.any_r
                            ? "any"
                            : (verdict.compat.r ? std::to_string(*verdict.compat.r)
                                                : "none");
    if (opt.json) {
      Json j;
      j["op"] = "orbit-check";
      j["orbit"] = verdict.is_orbit;
      j["twist"] = twist;
      j["limit"] = filtration_to_json(*verdict.limit);
      j["limit_semistable"] = verdict.semistability.semistable;
      j["enumeration"] =
          verdict.semistability.enumeration_complete ? "complete" : "partial";
      if (verdict.semistability.witness)
        j["witness"] = matrix_to_json(*verdict.semistability.witness);
      out << j.dump(2) << "\n";
    } else {
      out << "orbit: " << (verdict.is_orbit ? "true" : "false") << "\n";
      out << "twist r: " << twist << "\n";
      out << "limit:\n";
      print_filtration(out, *verdict.limit);
      out << "limit semistable: "
          << (verdict.semistability.semistable ? "true" : "false") << "\n";
      if (verdict.semistability.witness) {
        out << "witness slope: " << rat_to_string(verdict.semistability.witness_slope)
            << "\n";
        out << "witness basis:\n";
        print_matrix(out, *verdict.semistability.witness, "  ");
      }
    }
    if (assert_flag && !verdict.is_orbit) exit_code = 1;
  });

  std::string jumps_csv = "0", pool_csv = "0,1";
  long budget = 200000;
  auto* osearch = orbit->add_subcommand("search", "exhaustive Definition-6.2 harness");
  osearch->add_option("fixture", fx_path)->required();
  osearch->add_option("isocrystal", name_a)->required();
  osearch->add_option("--jumps", jumps_csv, "jump multiset, comma separated")->required();
  osearch->add_option("--pool", pool_csv, "coefficient pool, comma separated");
  osearch->add_option("--budget", budget, "enumeration cap");
  osearch->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    OrbitSearchConfig config;
    config.pool = parse_rat_list(pool_csv);
    config.budget = budget;
    const auto& E = fx.isocrystal(name_a);
    auto found = orbit_search(E, parse_rat_list(jumps_csv), config);
    Json records = Json::array();
    for (const auto& inst : found) {
      Json rec;
      rec["p"] = fx.prime;
      rec["E"] = matrix_to_json(E.frobenius());
      rec["N"] = matrix_to_json(inst.N);
      rec["F0"] = filtration_to_json(inst.F0);
      rec["r"] = inst.compat.any_r ? Json("any")
                                   : Json(static_cast<long>(*inst.compat.r));
      rec["limit"] = filtration_to_json(inst.limit);
      rec["semistable"] = inst.semistable;
      rec["enumeration"] = inst.enumeration_complete ? "complete" : "partial";
      records.push_back(rec);
    }
    if (!opt.results_path.empty()) {
      std::ofstream res(opt.results_path, std::ios::app);
      if (!res) throw ValidationError("cannot open results file");
      for (const auto& rec : records) res << rec.dump() << "\n";
    }
    if (opt.json) {
      Json j;
      j["op"] = "orbit-search";
      j["found"] = records.size();
      j["instances"] = records;
      out << j.dump(2) << "\n";
    } else {
      out << "found: " << records.size() << "\n";
      for (const auto& rec : records) out << rec.dump() << "\n";
    }
  });

  // weight-filtration
  auto* wf = app.add_subcommand("weight-filtration", "monodromy weight filtration");
  wf->add_option("fixture", fx_path)->required();
  wf->add_option("nilpotent", name_a)->required();
  wf->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto M = monodromy_weight_filtration(fx.nilpotent(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "weight-filtration";
      Json arr = Json::array();
      for (const auto& st : M.steps) {
        Json sj;
        sj["index"] = static_cast<long>(st.index);
        sj["dim"] = st.basis.cols();
        sj["basis"] = matrix_to_json(st.basis);
        arr.push_back(sj);
      }
      j["steps"] = arr;
      out << j.dump(2) << "\n";
    } else {
      for (const auto& st : M.steps) {
        out << "M_" << st.index << ": dim " << st.basis.cols() << "\n";
        print_matrix(out, st.basis, "  ");
      }
    }
  });

  // sl2
  auto* sl2 = app.add_subcommand("sl2", "Jacobson-Morozov triple");
  sl2->add_option("fixture", fx_path)->required();
  sl2->add_option("nilpotent", name_a)->required();
  sl2->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto triple = jacobson_morozov(fx.nilpotent(name_a));
    if (opt.json) {
      Json j;
      j["op"] = "sl2";
      j["H"] = matrix_to_json(triple.semisimple);
      j["X+"] = matrix_to_json(triple.raising);
      j["X-"] = matrix_to_json(triple.lowering);
      out << j.dump(2) << "\n";
    } else {
      out << "H:\n";
      print_matrix(out, triple.semisimple, "  ");
      out << "X+:\n";
      print_matrix(out, triple.raising, "  ");
      out << "X-:\n";
      print_matrix(out, triple.lowering, "  ");
    }
  });

  // fourier family
  auto* fourier = app.add_subcommand("fourier", "character calculus");
  fourier->require_subcommand(1);
  std::string poly_csv, func_csv, omega_str;
  auto* fexpand = fourier->add_subcommand("expand", "Mahler expansion of a polynomial");
  fexpand->add_option("--poly", poly_csv, "polynomial coefficients, low degree first")
      ->required();
  fexpand->callback([&] {
    refresh();
    auto series = mahler_expand(RatPoly(parse_rat_list(poly_csv)), opt.prime,
                                opt.precision);
    if (opt.json) {
      Json j;
      j["op"] = "fourier-expand";
      Json arr = Json::array();
      for (const auto& c : series.coeffs()) arr.push_back(scalar_to_json(c));
      j["coefficients"] = arr;
      out << j.dump(2) << "\n";
    } else {
      out << "coefficients:\n";
      for (size_t n = 0; n < series.coeffs().size(); ++n)
        out << "  c_" << n << " = " << scalar_text(series.coeffs()[n]) << "\n";
    }
  });

  auto* fpair = fourier->add_subcommand("pairing", "residue pairing of a power series "
                                                   "against a polynomial function");
  fpair->add_option("--series", poly_csv, "power series coefficients")->required();
  fpair->add_option("--func", func_csv, "polynomial function coefficients")->required();
  fpair->callback([&] {
    refresh();
    auto F = PadicPoly::from_rationals(opt.prime, parse_rat_list(poly_csv), opt.precision);
    auto f = mahler_expand(RatPoly(parse_rat_list(func_csv)), opt.prime, opt.precision);
    auto value = amice_pairing(F, f);
    if (opt.json) {
      Json j;
      j["op"] = "fourier-pairing";
      j["value"] = scalar_to_json(value);
      out << j.dump(2) << "\n";
    } else {
      out << "pairing: " << scalar_text(value) << "\n";
    }
  });

  int lmax = 20;
  long nmax = 20;
  auto* fest = fourier->add_subcommand("estimates", "binomial-polynomial norm table");
  fest->add_option("--lmax", lmax);
  fest->add_option("--nmax", nmax);
  fest->add_option("--omega", omega_str, "valuation of Omega (default 1/(p-1))");
  fest->callback([&] {
    refresh();
    Rat omega = omega_str.empty() ? Rat(1, opt.prime - 1) : rat_from_string(omega_str);
    auto rep = estimate_report(opt.prime, lmax, nmax, omega);
    if (opt.json) {
      Json j;
      j["op"] = "fourier-estimates";
      j["p"] = rep.prime;
      j["omega"] = rat_to_string(rep.omega);
      j["bound_holds"] = rep.bound_holds;
      Json rows = Json::array();
      for (const auto& row : rep.rows) {
        Json rj;
        rj["p"] = rep.prime;
        rj["l"] = row.l;
        rj["n"] = static_cast<long>(row.n);
        rj["omega"] = rat_to_string(rep.omega);
        rj["valuation"] = rat_to_string(row.norm_valuation);
        rows.push_back(rj);
      }
      j["rows"] = rows;
      Json fits = Json::array();
      for (const auto& [n, slope] : rep.decay_fit) {
        Json fj;
        fj["n"] = static_cast<long>(n);
        fj["slope"] = rat_to_string(slope);
        fits.push_back(fj);
      }
      j["decay_fit"] = fits;
      out << j.dump(2) << "\n";
    } else {
      out << "p l n omega valuation\n";
      for (const auto& row : rep.rows)
        out << rep.prime << " " << row.l << " " << row.n << " "
            << rat_to_string(rep.omega) << " " << rat_to_string(row.norm_valuation)
            << "\n";
      out << "bound-holds: " << (rep.bound_holds ? "true" : "false") << "\n";
      for (const auto& [n, slope] : rep.decay_fit)
        out << "decay-fit n=" << n << ": " << rat_to_string(slope) << "\n";
    }
  });

  // flag-distance
  auto* fdist = app.add_subcommand("flag-distance", "ultrametric distance of two flags");
  fdist->add_option("fixture", fx_path)->required();
  fdist->add_option("first", name_a)->required();
  fdist->add_option("second", name_b)->required();
  fdist->callback([&] {
    refresh();
    auto fx = load_with_overrides(fx_path, opt);
    auto d = flag_distance(fx.filtration(name_a), fx.filtration(name_b));
    if (opt.json) {
      Json j;
      j["op"] = "flag-distance";
      j["distance"] = d.to_string();
      out << j.dump(2) << "\n";
    } else {
      out << d.to_string() << "\n";
    }
  });

  // verify
  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite)
      ->required()
      ->check(CLI::IsMember({"padic", "isocrystal", "filtration", "orbit", "fourier",
                             "all"}));
  verify->callback([&] {
    refresh();
    std::vector<VerifyReport> reports;
    if (suite == "all")
      reports = verify_all(opt.seed);
    else
      reports.push_back(verify_suite(suite, opt.seed));
    bool ok = true;
    if (opt.json) {
      Json j;
      j["op"] = "verify";
      Json arr = Json::array();
      for (const auto& rep : reports) {
        Json rj;
        rj["suite"] = rep.suite;
        Json lines = Json::array();
        for (const auto& line : rep.lines) {
          Json lj;
          lj["name"] = line.name;
          lj["pass"] = line.pass;
          lj["details"] = line.details;
          if (!line.pass) lj["counterexample"] = line.counterexample;
          lines.push_back(lj);
          ok = ok && line.pass;
        }
        rj["lines"] = lines;
        arr.push_back(rj);
      }
      j["suites"] = arr;
      j["ok"] = ok;
      out << j.dump(2) << "\n";
    } else {
      for (const auto& rep : reports) {
        out << "suite " << rep.suite << ":\n";
        for (const auto& line : rep.lines) {
          out << "  " << line.name << ": " << (line.pass ? "PASS" : "FAIL") << " ("
              << line.details << ")\n";
          if (!line.pass) out << "    counterexample: " << line.counterexample << "\n";
          ok = ok && line.pass;
        }
      }
      out << (ok ? "all checks passed" : "FAILURES present") << "\n";
    }
    if (!ok) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  std::cout << out.str();
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::precision: return 3;
      case ErrorKind::property: return 1;
      default: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "phodge/fixture.hpp"

#include <fstream>

namespace phodge {

const Isocrystal& Fixture::isocrystal(const std::string& name) const {
  auto it = isocrystals.find(name);
  if (it == isocrystals.end()) throw ValidationError("no isocrystal named '" + name + "'");
  return it->second;
}

const FilteredSpace& Fixture::filtration(const std::string& name) const {
  auto it = filtrations.find(name);
  if (it == filtrations.end()) throw ValidationError("no filtration named '" + name + "'");
  return it->second;
}

const NilpotentOperator& Fixture::nilpotent(const std::string& name) const {
  auto it = nilpotents.find(name);
  if (it == nilpotents.end()) throw ValidationError("no nilpotent named '" + name + "'");
  return it->second;
}

const OneParamSubgroup& Fixture::subgroup(const std::string& name) const {
  auto it = subgroups.find(name);
  if (it == subgroups.end()) throw ValidationError("no subgroup named '" + name + "'");
  return it->second;
}

const PeriodMapModel& Fixture::model(const std::string& name) const {
  auto it = models.find(name);
  if (it == models.end()) throw ValidationError("no model named '" + name + "'");
  return it->second;
}

const Isocrystal& Fixture::ambient_of(const std::string& filtration_name,
                                      const std::string& explicit_name) const {
  if (!explicit_name.empty()) return isocrystal(explicit_name);
  auto it = filtration_ambient.find(filtration_name);
  if (it == filtration_ambient.end())
    throw ValidationError("filtration '" + filtration_name +
                          "' has no ambient isocrystal; pass one explicitly");
  return isocrystal(it->second);
}

PadicScalar scalar_from_json(const Json& j, int prime, Int precision) {
  if (j.is_string()) {
    Rat q = rat_from_string(j.get<std::string>());
    if (q == 0) return PadicScalar::zero(prime);
    return PadicScalar::from_rational(prime, q, precision);
  }
  if (j.is_number_integer()) {
    return PadicScalar::from_int(prime, j.get<long>(), precision);
  }
  if (j.is_object()) {
    if (j.contains("O")) return PadicScalar::o_zero(prime, j.at("O").get<long>());
    if (!j.contains("val") || !j.contains("digits"))
      throw ValidationError("scalar record needs val and digits");
    const Int val = j.at("val").get<long>();
    const Int prec = j.contains("prec") ? j.at("prec").get<long>() : val + precision;
    mpz_class unit(0), power(1);
    for (const auto& d : j.at("digits")) {
      unit += power * mpz_class(d.get<int>());
      power *= prime;
    }
    if (prec <= val) throw ValidationError("scalar record has no digits below precision");
    return PadicScalar::from_unit(prime, val, unit, prec - val);
  }
  throw ValidationError("unrecognized scalar literal");
}

Json scalar_to_json(const PadicScalar& x) {
  switch (x.state()) {
    case PadicScalar::State::exact_zero:
      return Json("0");
    case PadicScalar::State::o_zero: {
      Json j;
      j["O"] = static_cast<long>(x.abs_precision());
      return j;
    }
    default: {
      Json j;
      j["val"] = static_cast<long>(x.valuation());
      j["digits"] = x.unit_digits();
      j["prec"] = static_cast<long>(x.abs_precision());
      return j;
    }
  }
}

PMat matrix_from_json(const Json& rows, int prime, Int precision) {
  if (!rows.is_array() || rows.empty()) throw ValidationError("matrix literal must be a non-empty array");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.at(0).size());
  PMat m(prime, r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows.at(i).size()) != c)
      throw ValidationError("ragged matrix literal");
    for (int j = 0; j < c; ++j)
      m.at(i, j) = scalar_from_json(rows.at(i).at(j), prime, precision);
  }
  return m;
}

Json matrix_to_json(const PMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

FilteredSpace filtration_from_json(const Json& j, int prime, Int precision) {
  if (!j.contains("jumps") || !j.contains("bases"))
    throw ValidationError("filtration record needs jumps and bases");
  const auto& jumps = j.at("jumps");
  const auto& bases = j.at("bases");
  if (jumps.size() != bases.size())
    throw ValidationError("filtration jumps/bases length mismatch");
  std::vector<FilStep> steps;
  int ambient = -1;
  for (size_t i = 0; i < jumps.size(); ++i) {
    Rat jump = rat_from_string(jumps.at(i).get<std::string>());
    PMat basis = matrix_from_json(bases.at(i), prime, precision);
    if (ambient < 0) ambient = basis.rows();
    steps.push_back(FilStep{jump, std::move(basis)});
  }
  return FilteredSpace(prime, ambient, std::move(steps));
}

Json filtration_to_json(const FilteredSpace& F) {
  Json j;
  Json jumps = Json::array();
  Json bases = Json::array();
  for (const auto& st : F.steps()) {
    jumps.push_back(rat_to_string(st.jump));
    bases.push_back(matrix_to_json(st.basis));
  }
  j["jumps"] = jumps;
  j["bases"] = bases;
  return j;
}

Json newton_to_json(const NewtonVector& nu) {
  Json j = Json::array();
  for (const auto& s : nu.flat()) j.push_back(rat_to_string(s));
  return j;
}

Fixture load_fixture(const Json& doc) {
  Fixture fx;
  if (!doc.contains("p")) throw ValidationError("fixture needs a prime 'p'");
  fx.prime = doc.at("p").get<int>();
  if (fx.prime < 2) throw ValidationError("prime must be >= 2");
  if (doc.contains("precision")) fx.precision = doc.at("precision").get<long>();
  if (fx.precision < 4) throw ValidationError("precision must be >= 4");

  if (doc.contains("isocrystals")) {
    for (const auto& [name, rec] : doc.at("isocrystals").items()) {
      if (rec.contains("p") && rec.at("p").get<int>() != fx.prime)
        throw ValidationError("object prime differs from fixture prime");
      PMat frob = matrix_from_json(rec.at("frobenius"), fx.prime, fx.precision);
      if (rec.contains("dim") && rec.at("dim").get<int>() != frob.rows())
        throw ValidationError("declared dim differs from matrix size");
      fx.isocrystals.emplace(name, Isocrystal(fx.prime, std::move(frob)));
    }
  }
  if (doc.contains("filtrations")) {
    for (const auto& [name, rec] : doc.at("filtrations").items()) {
      fx.filtrations.emplace(name, filtration_from_json(rec, fx.prime, fx.precision));
      if (rec.contains("ambient")) {
        const std::string amb = rec.at("ambient").get<std::string>();
        if (fx.isocrystals.find(amb) == fx.isocrystals.end())
          throw ValidationError("ambient '" + amb + "' is not a declared isocrystal");
        if (fx.isocrystals.at(amb).dim() != fx.filtrations.at(name).ambient_dim())
          throw ValidationError("ambient dimension mismatch for '" + name + "'");
        fx.filtration_ambient.emplace(name, amb);
      }
    }
  }
  if (doc.contains("nilpotents")) {
    for (const auto& [name, rec] : doc.at("nilpotents").items()) {
      PMat m = matrix_from_json(rec.at("matrix"), fx.prime, fx.precision);
      std::optional<Int> twist;
      if (rec.contains("twist")) twist = rec.at("twist").get<long>();
      fx.nilpotents.emplace(name, NilpotentOperator(std::move(m), twist));
    }
  }
  if (doc.contains("subgroups")) {
    for (const auto& [name, rec] : doc.at("subgroups").items()) {
      std::vector<Int> weights;
      for (const auto& w : rec.at("weights")) weights.push_back(w.get<long>());
      PMat frame = rec.contains("frame")
                       ? matrix_from_json(rec.at("frame"), fx.prime, fx.precision)
                       : PMat::identity(fx.prime, static_cast<int>(weights.size()),
                                        fx.precision);
      fx.subgroups.emplace(name, OneParamSubgroup(std::move(weights), std::move(frame)));
    }
  }
  if (doc.contains("models")) {
    for (const auto& [name, rec] : doc.at("models").items()) {
      const std::string base_name = rec.at("base").get<std::string>();
      auto it = fx.filtrations.find(base_name);
      if (it == fx.filtrations.end())
        throw ValidationError("model base '" + base_name + "' is not a filtration");
      std::vector<PMat> sen;
      if (rec.contains("sen"))
        for (const auto& coeff : rec.at("sen"))
          sen.push_back(matrix_from_json(coeff, fx.prime, fx.precision));
      const Int radius = rec.contains("radius") ? rec.at("radius").get<long>() : 1;
      fx.models.emplace(name, PeriodMapModel(it->second, std::move(sen), radius));
    }
  }
  return fx;
}

Fixture load_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fixture file '" + path + "'");
  Json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("fixture parse error: ") + e.what());
  }
  return load_fixture(doc);
}

}  // namespace phodge

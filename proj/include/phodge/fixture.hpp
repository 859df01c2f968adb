#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "phodge/fourier.hpp"
#include "phodge/orbit.hpp"

namespace phodge {

using Json = nlohmann::ordered_json;

/// One fixture document: a prime, a working precision, and named objects.
/// All objects validate on load and must share the prime.
struct Fixture {
  int prime = 5;
  Int precision = kDefaultRelPrec;
  std::map<std::string, Isocrystal> isocrystals;
  std::map<std::string, FilteredSpace> filtrations;
  std::map<std::string, std::string> filtration_ambient;  // optional cross-refs
  std::map<std::string, NilpotentOperator> nilpotents;
  std::map<std::string, OneParamSubgroup> subgroups;
  std::map<std::string, PeriodMapModel> models;

  const Isocrystal& isocrystal(const std::string& name) const;
  const FilteredSpace& filtration(const std::string& name) const;
  const NilpotentOperator& nilpotent(const std::string& name) const;
  const OneParamSubgroup& subgroup(const std::string& name) const;
  const PeriodMapModel& model(const std::string& name) const;
  /// The isocrystal for a filtration: an explicit name, or the
  /// filtration's declared ambient.
  const Isocrystal& ambient_of(const std::string& filtration_name,
                               const std::string& explicit_name) const;
};

Fixture load_fixture(const Json& doc);
Fixture load_fixture_file(const std::string& path);

/// Scalar literals: "a/b" rational strings, digit records
/// {"val": v, "digits": [d0, ...], "prec": M}, or {"O": M} for an inexact
/// zero.  Emission uses the same forms.
PadicScalar scalar_from_json(const Json& j, int prime, Int precision);
Json scalar_to_json(const PadicScalar& x);

PMat matrix_from_json(const Json& rows, int prime, Int precision);
Json matrix_to_json(const PMat& m);

FilteredSpace filtration_from_json(const Json& j, int prime, Int precision);
Json filtration_to_json(const FilteredSpace& F);

Json newton_to_json(const NewtonVector& nu);

}  // namespace phodge

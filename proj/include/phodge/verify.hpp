#pragma once

#include <string>
#include <vector>

namespace phodge {

struct VerifyLine {
  std::string name;
  bool pass = true;
  std::string details;         // shown as "NAME: PASS (details)"
  std::string counterexample;  // dumped on failure
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyLine> lines;
  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return true;
  }
};

std::vector<std::string> verify_suite_names();

/// Run one named property suite ("padic", "isocrystal", "filtration",
/// "orbit", "fourier") with a fixed seed.
VerifyReport verify_suite(const std::string& suite, unsigned long seed);

/// All suites in order.
std::vector<VerifyReport> verify_all(unsigned long seed);

}  // namespace phodge

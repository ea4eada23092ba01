#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsq/report.hpp"

namespace dsq {

struct SuiteSpec {
  std::string name;
  std::string summary;
};

// Registration order is the run order of `verify`.
const std::vector<SuiteSpec>& suite_registry();

// One aggregated report per suite: ok = every instance passed, details carry
// instance counts and the first failing payload. Throws Error("UnknownSuite").
Report run_suite(const std::string& name, std::uint64_t seed, double tol);

// Empty selector runs everything, otherwise the named subset in registry order.
std::vector<Report> run_suites(const std::vector<std::string>& selector,
                               std::uint64_t seed, double tol);

}  // namespace dsq

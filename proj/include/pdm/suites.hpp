#pragma once

#include <map>
#include <string>
#include <vector>

#include "pdm/config.hpp"

namespace pdm {

// One checked quantity. comparison is "<", "<=", ">=", "==" or "info";
// info metrics never affect the verdict.
struct Metric {
    std::string key;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison = "info";
    bool pass = true;
};

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::string error;  // set when the suite aborted on a numerical error
    std::vector<Metric> metrics;
    std::map<std::string, std::vector<double>> series;  // e.g. eigenvalue lists
};

// Grid sizes of the refinement trio around n: (n+1)/2, n, 2n-1.
std::vector<std::size_t> refinement_trio(std::size_t n);

SuiteResult run_suite(const RunConfig& cfg, const std::string& name);
// Results ordered by suite name.
std::vector<SuiteResult> run_suites(const RunConfig& cfg);
bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace pdm

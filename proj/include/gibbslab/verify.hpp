// The built-in verification suites: each criterion runs with pinned
// parameters and tolerances and reports one pass/fail line.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace gibbslab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // measured values and tolerances
    double seconds = 0.0;
};

struct CriterionSpec {
    int id;
    std::string name;
    std::string suite;  // oracle | exponential | entropy | clt | ldp
    std::function<CriterionResult(unsigned workers)> run;
};

const std::vector<CriterionSpec>& acceptance_criteria();

// Runs one criterion (1-based) or a named suite ("all", "oracle", ...).
std::vector<CriterionResult> run_criteria(const std::string& selector, unsigned workers);

std::string format_criteria_table(const std::vector<CriterionResult>& results);

}  // namespace gibbslab

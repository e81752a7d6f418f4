// Acceptance runner: executes the built-in criteria and prints one
// pass/fail line per criterion. Usage: acceptance_tests [1..12|suite|all]
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "gibbslab/common.hpp"
#include "gibbslab/verify.hpp"

int main(int argc, char** argv) {
    const std::string selector = argc > 1 ? argv[1] : "all";
    unsigned workers = gibbslab::default_workers();
    if (argc > 2) workers = static_cast<unsigned>(std::atoi(argv[2]));
    try {
        const auto results = gibbslab::run_criteria(selector, workers);
        std::cout << gibbslab::format_criteria_table(results);
        for (const auto& r : results)
            if (!r.pass) return 2;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

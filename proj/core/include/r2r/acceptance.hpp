#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "r2r/chain.hpp"

namespace r2r::acceptance {

struct AcceptanceOptions {
    bool quick = false;  // trims the heavy Monte Carlo sample counts 10x
    int threads = 1;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

// Runs the full verification battery; one result per criterion, in order.
// When `live` is given, a [PASS]/[FAIL] line is streamed per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* live = nullptr);

bool all_passed(const std::vector<CriterionResult>& results);

std::string format_result_line(const CriterionResult& r);

// Individually callable so tests can inject tampered constants and watch the
// check fail.
CriterionResult criterion_eigenvalue(const chain::BoundConstants& constants = {});
CriterionResult criterion_constant_consistency(const chain::BoundConstants& constants = {});

}  // namespace r2r::acceptance

#pragma once

#include <string>

#include "lradi/adi.hpp"
#include "lradi/tangential.hpp"

namespace lradi {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed discrepancy
    double threshold = 0.0;
};

struct VerifyOptions {
    unsigned seed_base = 1;
    int seeds = 5;
    std::vector<Index> sizes = {1, 8, 20, 40};
    bool inject_fault = false;  // corrupt a factor entry; the suite must then fail
};

/// Cross-checks the algebraic identities the solver rests on: classical vs
/// residual-based block iteration, complex vs real pair steps, the iteration
/// vs the restarted projection route, per-step residual identities, the
/// reduced-equation closed form, and dense-solve symmetry/definiteness.
std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opt);

}  // namespace lradi

#pragma once

#include "lradi/adi.hpp"

namespace lradi {

/// Coefficient triple of the complex-pair step. beta exists whenever the
/// shift has a genuine imaginary part; numerically near-real shifts are
/// rejected and belong on the real-shift path.
struct ComplexPairCoefficients {
    Complex alpha;  // b^H conj(b) * Re(s) / conj(s)
    double beta;    // 1 / sqrt(1 - |alpha|^2)
    double gamma;   // sqrt(1 + Re(alpha))
};
ComplexPairCoefficients complex_pair_coeffs(const ShiftPair& sp);

/// One real-shift tangential step: appends z = sqrt(2s)(A - sE)^{-1} Bperp b
/// and updates the residual factor. presolved_y, when given, is the unscaled
/// solution (A - sE)^{-1} Bperp b from a shift source that already solved it.
void tlradi_step_real(const LyapunovProblem& p, AdiState& state, const ShiftPair& sp,
                      const CMat* presolved_y = nullptr);

/// Complex-arithmetic pair step (the two-column update covering (s, b) and
/// its conjugate). Pure-value form over a possibly complex residual factor;
/// test-only path.
struct ComplexStepResult {
    CMat z_block;  // n x 2
    CMat l_block;  // m x 2
    CMat bperp;    // updated residual factor
};
ComplexStepResult tlradi_step_complex_c(const LyapunovProblem& p, const CMat& bperp, const ShiftPair& sp);

/// Real-arithmetic pair step; the production path for complex shifts.
void tlradi_step_complex_r(const LyapunovProblem& p, AdiState& state, const ShiftPair& sp,
                           const CMat* presolved_y = nullptr);

struct TlradiOptions {
    double tol = 1e-8;
    Index max_cols = 200;
    std::function<void(const AdiState&)> per_step;  // optional verification hook
};

/// The tangential driver: dispatches real/pair steps on the shifts a source
/// emits until the residual test passes, the column budget is exhausted, or
/// the source runs dry (converged flag reports which).
AdiState tlradi_run(const LyapunovProblem& p, ShiftSource& source, const TlradiOptions& opt);

}  // namespace lradi

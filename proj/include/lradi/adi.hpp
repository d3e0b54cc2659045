#pragma once

#include <functional>

#include "lradi/shifts.hpp"

namespace lradi {

struct StepRecord {
    Index iter = 0;
    Index cols = 0;
    double residual_norm = 0.0;  // max eig of Bperp^T Bperp
    double seconds = 0.0;        // cumulative wall time
    Complex shift{0.0, 0.0};
};

/// Accumulated low-rank data of a run. The factor Z and the residual factor
/// Bperp stay real; complex conjugate shifts are processed as atomic
/// two-column (or 2m-column) real blocks.
struct AdiState {
    RMat z;
    RMat bperp;
    std::vector<RMat> lblocks;           // per-step residual-update coefficients
    std::vector<Complex> shift_history;  // one entry per step (pair steps store s)
    std::vector<StepRecord> residual_history;
    bool converged = false;

    RMat gramian() const { return multiply(z, z, Op::N, Op::T); }
};

/// ||R||_2 of the factored residual, the paper's squared-factor convention.
double residual_norm(const RMat& bperp);

/// Relative gap in A Z Z^T E^T + E Z Z^T A^T + B B^T = Bperp Bperp^T,
/// Frobenius, normalized by ||B B^T||_F. Desk-scale verification helper.
double residual_identity_gap(const LyapunovProblem& p, const RMat& z, const RMat& bperp);

/// Splits a conjugation-closed shift list into real steps and adjacent
/// conjugate pairs; rejects unpaired complex shifts and nonpositive real
/// parts.
struct PlannedStep {
    Complex s;
    bool pair = false;
};
std::vector<PlannedStep> plan_shift_list(const std::vector<Complex>& shifts);

/// Classical iteration in complex arithmetic; kept as the Lemma-1 test
/// oracle. The Gramian and residual factor are checked real and returned as
/// real matrices.
struct BlockClassicResult {
    CMat z;
    RMat phat;   // Re(Z Z^H) after the imaginary-part check
    RMat bperp;  // from the post-hoc factor formula
};
BlockClassicResult block_adi_classic(const LyapunovProblem& p, const std::vector<Complex>& shifts);

/// B + E Z L^T with L = [sqrt(2 Re s_1) I_m, ..., sqrt(2 Re s_k) I_m].
CMat residual_factor_classic(const LyapunovProblem& p, const CMat& z, const std::vector<Complex>& shifts);

/// Residual-based reformulation; the production block path.
AdiState block_adi_residual(const LyapunovProblem& p, const std::vector<Complex>& shifts);

/// Single block steps, exposed for the drivers and tests.
void block_step_real(const LyapunovProblem& p, AdiState& state, double s);
void block_step_pair(const LyapunovProblem& p, AdiState& state, Complex s);

enum class BladiInit {
    RitzOfB,       // variant a: mirrored Ritz values after projection with B
    SmallestEigs,  // variant b: m mirrored smallest-magnitude eigenvalues
};

struct BladiOptions {
    double tol = 1e-8;
    Index max_iters = 200;  // block steps
    BladiInit init = BladiInit::SmallestEigs;
    std::function<void(const AdiState&)> per_step;  // optional verification hook
};

/// Adaptive block iteration: consumes each shift set in deterministic order,
/// then projects with the last iterate, keeps the left-half-plane Ritz
/// values and mirrors them into the next set.
AdiState bladi_run(const LyapunovProblem& p, const BladiOptions& opt);

/// Next adaptive block shift set from the last iterate; exposed for tests.
std::vector<Complex> bladi_next_shift_set(const LyapunovProblem& p, const RMat& last_block);

}  // namespace lradi

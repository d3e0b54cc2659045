#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lradi/problem.hpp"

namespace lradi {

/// One shift with its tangential direction. The direction is normalized to
/// unit length and phase-fixed (largest-modulus entry real positive) at
/// construction; the shift must lie in the open right half-plane.
struct ShiftPair {
    Complex s;
    CMat b;  // m x 1

    ShiftPair(Complex shift, CMat direction);

    /// Dispatch rule: treated as real when |Im(s)| <= 1e-12 |s|.
    bool is_real() const;
    /// True when every direction entry is real after phase normalization.
    bool direction_is_real() const;
    RMat direction_real() const;
};

/// Result of projecting the pencil onto a thin basis: the projected matrices,
/// their eigenvalues, and the transformed input rows that seed new tangential
/// directions.
struct RitzData {
    RMat aj;                   // (V^H E V)^{-1} V^H A V
    RMat bj;                   // (V^H E V)^{-1} V^H Bperp
    std::vector<Complex> d;    // eigenvalues of aj, sorted
    CMat btilde;               // U^{-1} bj
    RMat v;                    // the (realified) basis that was projected
};

/// Galerkin projection with the E-weighted inverse, V of width 1 or 2.
/// Complex conjugate-pair bases are realified to [Re v, Im v] first.
RitzData project_pair(const LyapunovProblem& p, const RMat& bperp, const CMat& v);
RitzData project_pair(const LyapunovProblem& p, const RMat& bperp, const RMat& v);

/// Column ell solves (A + d_ell E) v = Bperp (btilde row ell)^H; a conjugate
/// pair costs one complex solve, the partner column is its conjugate.
/// Columns come back unit-normalized.
CMat tangential_krylov_basis(const LyapunovProblem& p, const RMat& bperp, const std::vector<Complex>& d,
                             const CMat& btilde);
/// Unnormalized variant satisfying A V + E V D = Bperp Btilde^H exactly.
CMat tangential_krylov_basis_raw(const LyapunovProblem& p, const RMat& bperp, const std::vector<Complex>& d,
                                 const CMat& btilde);

/// Smallest-magnitude generalized eigenvalues of (A, E) by subspace inverse
/// iteration (one LU of A). Escalates the subspace once when the Ritz values
/// stall, which also resolves complex pairs and near-degeneracies. The
/// returned set is closed under conjugation.
struct SmallestEigs {
    std::vector<Complex> values;  // |.|-ascending
    CMat vectors;                 // matching Ritz vectors
    bool converged = false;
};
SmallestEigs smallest_generalized_eigs(const LyapunovProblem& p, Index count);

/// Mirrored smallest-magnitude eigenvalue plus the matching input direction
/// b = normalize((v^H E^{-1} B)^H). Falls back to a ||B||_F shift with the
/// leading right-singular direction of B when the iteration stagnates.
struct InitialShift {
    ShiftPair pair;
    bool fallback_used = false;
};
InitialShift initial_shift(const LyapunovProblem& p);

/// IRKA-style update: repeated project/eigensolve/tangential-solve passes, at
/// most n_max of them, emitting the next shift/direction (two when both Ritz
/// values are real and the basis has two columns). The final basis is kept so
/// the driver can reuse the inner solve when it matches the emitted shift.
struct IrkaResult {
    std::vector<ShiftPair> pairs;        // 1 or 2, application order
    std::optional<CMat> presolved_y;     // (A - sE)^{-1} Bperp b for pairs[0]
    CMat final_basis;                    // last raw tangential basis
    int passes = 0;
    bool converged = false;
};
IrkaResult irka_update(const LyapunovProblem& p, const RMat& bperp, const RMat& zi, double irka_tol,
                       int n_max);

struct NextShift {
    ShiftPair pair;
    std::optional<CMat> presolved_y;
};

/// Supplier of shift/direction pairs for the tangential driver. last_block is
/// the slice of Z appended since the previous query, null before the first
/// step.
class ShiftSource {
public:
    virtual ~ShiftSource() = default;
    virtual std::optional<NextShift> next(const LyapunovProblem& p, const RMat& bperp,
                                          const RMat* last_block) = 0;
};

class StaticShiftSource : public ShiftSource {
public:
    explicit StaticShiftSource(std::vector<ShiftPair> pairs);
    std::optional<NextShift> next(const LyapunovProblem& p, const RMat& bperp, const RMat* last_block) override;

private:
    std::vector<ShiftPair> pairs_;
    size_t idx_ = 0;
};

class AdaptiveShiftSource : public ShiftSource {
public:
    AdaptiveShiftSource(int n_max, double irka_tol);
    std::optional<NextShift> next(const LyapunovProblem& p, const RMat& bperp, const RMat* last_block) override;
    bool initial_fallback_used() const { return initial_fallback_; }

private:
    int n_max_;
    double irka_tol_;
    std::deque<NextShift> queue_;
    bool initial_fallback_ = false;
};

/// Plain-text shift list: one "Re Im b1Re b1Im ... bmRe bmIm" row per shift,
/// '#' starts a comment.
std::vector<ShiftPair> load_shift_file(const std::string& path, Index m);
void write_shift_file(const std::string& path, const std::vector<ShiftPair>& pairs);

}  // namespace lradi

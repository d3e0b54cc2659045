#pragma once

#include "lradi/shifts.hpp"

namespace lradi {

/// Raw tangential Krylov data: basis V, diagonal shift matrix (stored as the
/// shift list), and the scaled direction matrix L, satisfying the Sylvester
/// relation A V - E V S = B L.
struct KrylovData {
    CMat v;                       // n x k
    std::vector<Complex> shifts;  // diagonal of S
    CMat l;                       // m x k
    Index n = 0;
    Index m = 0;
};

/// Expands complex entries into adjacent (s, b), (conj s, conj b) pairs so a
/// tangential sequence becomes conjugation-closed.
std::vector<ShiftPair> expand_conjugate_pairs(const std::vector<ShiftPair>& pairs);

/// Column j is sqrt(2 Re s_j) (A - s_j E)^{-1} B b_j with the matching scaled
/// direction in L. Shifts must be pairwise distinct.
KrylovData build_tangential_basis(const LyapunovProblem& p, const std::vector<ShiftPair>& pairs);

/// The reduced solution of the projection route.
CMat oracle_reduced_solution(const KrylovData& kd);

/// Projection-route approximant P = V X^{-1} V^H, Hermitian (complex unless
/// the shift set is conjugation-closed).
CMat krylov_approximant(const KrylovData& kd);

/// Residual factor B + E V X^{-1} L^H of the projection route.
CMat krylov_residual_factor(const LyapunovProblem& p, const KrylovData& kd);

/// Real part after asserting the imaginary residue is below rel_tol times
/// the norm.
RMat real_checked(const CMat& a, double rel_tol);

/// The projection route applied with the restart interpretation: each real
/// shift (or conjugate pair) gets the three-step treatment against the
/// current residual factor, which is then advanced by the projection-route
/// factor formula. Reproduces the iterative method exactly while sharing
/// none of its update algebra; the reduced solves stay 1x1 or 2x2 diagonal.
struct RestartedOracle {
    RMat phat;   // accumulated approximant
    RMat bperp;  // residual factor after the last restart
};
RestartedOracle krylov_restarted_solution(const LyapunovProblem& p, const std::vector<ShiftPair>& pairs);

}  // namespace lradi

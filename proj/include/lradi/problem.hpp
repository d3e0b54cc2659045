#pragma once

#include <optional>
#include <string>

#include "lradi/linalg.hpp"
#include "lradi/matrix.hpp"

namespace lradi {

/// The generalized equation data A P E^T + E P A^T + B B^T = 0. E must be
/// nonsingular; the pencil is expected stable (all generalized eigenvalues in
/// the open left half-plane), which desk-scale callers can verify with
/// check_stable().
struct LyapunovProblem {
    RMat a;
    RMat e;
    RMat b;

    Index n() const { return a.rows(); }
    Index m() const { return b.cols(); }

    /// Validates shapes, finiteness, m <= n, and nonsingular E (via LU).
    void validate() const;
    /// Dense stability check, n <= 50 recommended: Re of every generalized
    /// eigenvalue is negative.
    bool check_stable() const;
};

/// 1D heat rod: A = (n+1)^2 tridiag(1,-2,1), E = I, B holds m distinct
/// canonical basis columns chosen by the seed.
LyapunovProblem gen_heat_1d(Index n, Index m, unsigned seed);

/// Random stable pencil: A shifted below the spectral radius of its random
/// part, E a bounded perturbation of the identity that provably keeps the
/// pencil stable, B dense random. Deterministic in (n, m, seed).
LyapunovProblem gen_random_stable(Index n, Index m, unsigned seed);

/// Matrix Market ingestion (coordinate and array formats, real entries,
/// general or symmetric qualifiers, 1-based indices). E defaults to the
/// identity when no path is given.
LyapunovProblem load_matrix_market(const std::string& path_a, const std::optional<std::string>& path_e,
                                   const std::string& path_b);
RMat read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const RMat& m);

/// Convenience overload of the dense direct solve.
inline RMat dense_lyap_solve(const LyapunovProblem& p) { return dense_lyap_solve(p.a, p.e, p.b); }

}  // namespace lradi

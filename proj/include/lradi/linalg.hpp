#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lradi/kernels.hpp"
#include "lradi/matrix.hpp"

namespace lradi {

/// Eigenvalue order used everywhere: real part ascending, then |imag|
/// ascending, then positive imaginary first. Keeps conjugate pairs adjacent
/// with the +imag member leading and reduces to plain ascending order for
/// real spectra.
bool eig_value_less(const Complex& a, const Complex& b);
void sort_eig_values(std::vector<Complex>& values);

struct EigenDecomposition {
    std::vector<Complex> values;  // sorted by eig_value_less
    CMat right_vectors;           // U, columns matching values, unit norm, phase-fixed
    CMat btilde;                  // U^{-1} * B
};

/// Diagonalization of a small dense matrix plus the transformed input
/// B~ = U^{-1} B. Throws "non-diagonalizable projected matrix" when the
/// eigenvector matrix has 1-norm condition above 1e12.
EigenDecomposition small_eig(const CMat& m, const CMat& b);
/// Real overload: eigenvalues and vectors of exact conjugate pairs are
/// symmetrized so downstream conjugation tricks hold exactly.
EigenDecomposition small_eig(const RMat& m, const RMat& b);

/// Largest eigenvalue of a Hermitian PSD matrix; input is symmetrized first,
/// result clamped at zero.
double sym_max_eig(const RMat& g);
double sym_max_eig(const CMat& g);

/// X with X_ij = (L^H L)_ij / (conj(s_i) + s_j), the closed-form solution of
/// the reduced equation S^H X + X S = L^H L for S = diag(shifts). Shifts must
/// be pairwise distinct with positive real part.
CMat cauchy_lyap_solve(const std::vector<Complex>& shifts, const CMat& l);

/// One-shot (A - sE) Y = RHS.
CMat shifted_solve(const RMat& a, const RMat& e, Complex s, const CMat& rhs);

/// Count of shifted-system factorizations since process start; test
/// instrumentation for the adaptive update's effort accounting.
std::atomic<long>& shifted_factorization_count();

/// Factors (A - sE) once and serves repeated right-hand sides. A real shift
/// keeps the factorization (and real right-hand sides) in real arithmetic.
class ShiftedSolver {
public:
    ShiftedSolver(const RMat& a, const RMat& e, Complex s);

    CMat solve(const CMat& rhs) const;
    RMat solve_real(const RMat& rhs) const;  // requires a real shift
    bool real_shift() const { return rlu_.has_value(); }
    Complex shift() const { return s_; }

private:
    Complex s_;
    std::optional<RLu> rlu_;
    std::optional<CLu> clu_;
};

/// Dense direct solution of A P E^T + E P A^T + B B^T = 0. Brute-force
/// Kronecker elimination for small n, dense eigendecomposition of the pencil
/// beyond that; n capped at 300. The residual postcondition is checked before
/// returning.
RMat dense_lyap_solve(const RMat& a, const RMat& e, const RMat& b);
/// Kronecker-only path, exposed for cross-checking the spectral route.
RMat dense_lyap_solve_kron(const RMat& a, const RMat& e, const RMat& b);

// ---- lower-level eigensolvers ------------------------------------------

struct SymmetricEig {
    std::vector<double> values;  // ascending
    RMat vectors;                // orthonormal columns
};

/// Householder tridiagonalization + implicit-shift QL, real symmetric input.
SymmetricEig eig_symmetric(const RMat& a);
std::vector<double> eig_symmetric_values(const RMat& a);

struct GeneralEig {
    std::vector<Complex> values;  // sorted by eig_value_less
    CMat vectors;                 // unit columns, phase-fixed
};

/// Right eigenpairs of a general dense matrix via complex Hessenberg-QR.
GeneralEig eig_general(const CMat& m);
GeneralEig eig_general(const RMat& m);  // conjugate pairs symmetrized
std::vector<Complex> eig_values(const CMat& m);
std::vector<Complex> eig_values(const RMat& m);

/// Scale a unit vector so its largest-modulus entry is real positive; makes
/// eigenvectors and tangential directions reproducible.
void phase_normalize(CMat& column_vector);

/// Modified Gram-Schmidt with column dropping: returns an orthonormal basis
/// of the column span, discarding columns whose residual falls below
/// rank_tol times the largest original column norm.
RMat orthonormal_columns(const RMat& v, double rank_tol = 1e-12);

}  // namespace lradi

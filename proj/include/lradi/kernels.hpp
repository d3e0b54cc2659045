#pragma once

#include <atomic>

#include "lradi/matrix.hpp"

namespace lradi {

/// Operand transformation for multiply(): none, transpose, conjugate transpose.
enum class Op { N, T, H };

/// C = op(A) * op(B). OpenMP-parallel over output columns; every output entry
/// is accumulated by a single thread in a fixed order, so the result is
/// bitwise identical to the serial reference for any thread count.
RMat multiply(const RMat& a, const RMat& b, Op opa = Op::N, Op opb = Op::N);
CMat multiply(const CMat& a, const CMat& b, Op opa = Op::N, Op opb = Op::N);

/// Thrown when a factorization meets a pivot that is zero to working precision.
struct SingularMatrixError : std::runtime_error {
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// LU factorization with partial pivoting. Trailing-submatrix updates run
/// column-parallel under OpenMP.
template <class T>
class Lu {
public:
    explicit Lu(Mat<T> a);

    Mat<T> solve(const Mat<T>& rhs) const;
    Mat<T> inverse() const;
    Index dim() const { return lu_.rows(); }
    /// max-abs entry of the matrix that was factored, used in pivot thresholds
    double scale() const { return scale_; }

private:
    Mat<T> lu_;
    std::vector<Index> piv_;
    double scale_ = 0.0;
};

using RLu = Lu<double>;
using CLu = Lu<Complex>;

/// 1-norm condition estimate via the explicit inverse (desk-scale matrices).
template <class T>
double condition_1(const Mat<T>& a);

/// Count of LU factorizations performed since the last reset; test
/// instrumentation for the shift-update effort accounting.
std::atomic<long>& lu_factorization_count();

namespace serial {
/// Reference implementations kept for testing and the kernel benchmark.
RMat multiply(const RMat& a, const RMat& b, Op opa = Op::N, Op opb = Op::N);
CMat multiply(const CMat& a, const CMat& b, Op opa = Op::N, Op opb = Op::N);
RMat lu_solve(const RMat& a, const RMat& rhs);
}  // namespace serial

}  // namespace lradi

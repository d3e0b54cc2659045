#include "lradi/kernels.hpp"

#include <cmath>

namespace lradi {

namespace {

template <class T>
inline T op_entry(const Mat<T>& m, Index i, Index j, Op op) {
    if (op == Op::N) return m(i, j);
    if (op == Op::T) return m(j, i);
    if constexpr (std::is_same_v<T, Complex>)
        return std::conj(m(j, i));
    else
        return m(j, i);
}

template <class T>
inline Index op_rows(const Mat<T>& m, Op op) { return op == Op::N ? m.rows() : m.cols(); }
template <class T>
inline Index op_cols(const Mat<T>& m, Op op) { return op == Op::N ? m.cols() : m.rows(); }

template <class T>
void multiply_column(const Mat<T>& a, const Mat<T>& b, Op opa, Op opb, Index j, Mat<T>& c) {
    const Index m = c.rows();
    const Index kk = op_cols(a, opa);
    T* cj = c.col(j);
    if (opa == Op::N) {
        // accumulate c(:,j) += a(:,k) * b(k,j), contiguous in a
        for (Index k = 0; k < kk; ++k) {
            const T bkj = op_entry(b, k, j, opb);
            if (bkj == T{}) continue;
            const T* ak = a.col(k);
            for (Index i = 0; i < m; ++i) cj[i] += ak[i] * bkj;
        }
    } else {
        // c(i,j) = op(a) row i dotted with op(b) column j; a is read down column i
        for (Index i = 0; i < m; ++i) {
            T s{};
            const T* ai = a.col(i);
            for (Index k = 0; k < kk; ++k) {
                T av = ai[k];
                if constexpr (std::is_same_v<T, Complex>) {
                    if (opa == Op::H) av = std::conj(av);
                }
                s += av * op_entry(b, k, j, opb);
            }
            cj[i] = s;
        }
    }
}

template <class T>
Mat<T> multiply_parallel(const Mat<T>& a, const Mat<T>& b, Op opa, Op opb) {
    if (op_cols(a, opa) != op_rows(b, opb)) throw std::invalid_argument("multiply: dimension mismatch");
    Mat<T> c(op_rows(a, opa), op_cols(b, opb));
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < c.cols(); ++j) multiply_column(a, b, opa, opb, j, c);
    return c;
}

template <class T>
Mat<T> multiply_serial(const Mat<T>& a, const Mat<T>& b, Op opa, Op opb) {
    if (op_cols(a, opa) != op_rows(b, opb)) throw std::invalid_argument("multiply: dimension mismatch");
    Mat<T> c(op_rows(a, opa), op_cols(b, opb));
    for (Index j = 0; j < c.cols(); ++j) multiply_column(a, b, opa, opb, j, c);
    return c;
}

}  // namespace

RMat multiply(const RMat& a, const RMat& b, Op opa, Op opb) { return multiply_parallel(a, b, opa, opb); }
CMat multiply(const CMat& a, const CMat& b, Op opa, Op opb) { return multiply_parallel(a, b, opa, opb); }

namespace serial {
RMat multiply(const RMat& a, const RMat& b, Op opa, Op opb) { return multiply_serial(a, b, opa, opb); }
CMat multiply(const CMat& a, const CMat& b, Op opa, Op opb) { return multiply_serial(a, b, opa, opb); }
RMat lu_solve(const RMat& a, const RMat& rhs) {
    // plain serial LU, reference for the parallel factorization
    RMat lu = a;
    const Index n = lu.rows();
    if (n != lu.cols() || rhs.rows() != n) throw std::invalid_argument("lu_solve: dimension mismatch");
    std::vector<Index> piv(n);
    double scale = max_abs(lu);
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        piv[k] = p;
        if (p != k)
            for (Index j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
        if (std::abs(lu(k, k)) <= static_cast<double>(n) * 1e-16 * scale)
            throw SingularMatrixError("matrix is singular to working precision");
        for (Index i = k + 1; i < n; ++i) lu(i, k) /= lu(k, k);
        for (Index j = k + 1; j < n; ++j) {
            const double lkj = lu(k, j);
            if (lkj == 0.0) continue;
            for (Index i = k + 1; i < n; ++i) lu(i, j) -= lu(i, k) * lkj;
        }
    }
    RMat x = rhs;
    for (Index k = 0; k < n; ++k)
        if (piv[k] != k)
            for (Index j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv[k], j));
    for (Index j = 0; j < x.cols(); ++j) {
        for (Index k = 0; k < n; ++k)
            for (Index i = k + 1; i < n; ++i) x(i, j) -= lu(i, k) * x(k, j);
        for (Index k = n - 1; k >= 0; --k) {
            x(k, j) /= lu(k, k);
            for (Index i = 0; i < k; ++i) x(i, j) -= lu(i, k) * x(k, j);
        }
    }
    return x;
}
}  // namespace serial

std::atomic<long>& lu_factorization_count() {
    static std::atomic<long> count{0};
    return count;
}

template <class T>
Lu<T>::Lu(Mat<T> a) : lu_(std::move(a)), piv_(static_cast<size_t>(lu_.rows())) {
    const Index n = lu_.rows();
    if (n != lu_.cols()) throw std::invalid_argument("Lu: matrix must be square");
    if (!all_finite(lu_)) throw std::invalid_argument("Lu: non-finite entries");
    lu_factorization_count()++;
    scale_ = max_abs(lu_);
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        double best = std::abs(lu_(k, k));
        for (Index i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) { best = v; p = i; }
        }
        piv_[k] = p;
        if (p != k)
            for (Index j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        if (std::abs(lu_(k, k)) <= static_cast<double>(n) * 1e-16 * scale_)
            throw SingularMatrixError("matrix is singular to working precision");
        const T pivot = lu_(k, k);
        for (Index i = k + 1; i < n; ++i) lu_(i, k) /= pivot;
#pragma omp parallel for schedule(static)
        for (Index j = k + 1; j < n; ++j) {
            const T lkj = lu_(k, j);
            if (lkj == T{}) continue;
            T* colj = lu_.col(j);
            const T* colk = lu_.col(k);
            for (Index i = k + 1; i < n; ++i) colj[i] -= colk[i] * lkj;
        }
    }
}

template <class T>
Mat<T> Lu<T>::solve(const Mat<T>& rhs) const {
    const Index n = lu_.rows();
    if (rhs.rows() != n) throw std::invalid_argument("Lu::solve: dimension mismatch");
    Mat<T> x = rhs;
    for (Index k = 0; k < n; ++k)
        if (piv_[k] != k)
            for (Index j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv_[k], j));
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < x.cols(); ++j) {
        T* xj = x.col(j);
        for (Index k = 0; k < n; ++k) {
            const T xk = xj[k];
            if (xk == T{}) continue;
            const T* colk = lu_.col(k);
            for (Index i = k + 1; i < n; ++i) xj[i] -= colk[i] * xk;
        }
        for (Index k = n - 1; k >= 0; --k) {
            xj[k] /= lu_(k, k);
            const T xk = xj[k];
            if (xk == T{}) continue;
            const T* colk = lu_.col(k);
            for (Index i = 0; i < k; ++i) xj[i] -= colk[i] * xk;
        }
    }
    return x;
}

template <class T>
Mat<T> Lu<T>::inverse() const {
    return solve(Mat<T>::identity(lu_.rows()));
}

template class Lu<double>;
template class Lu<Complex>;

template <class T>
double condition_1(const Mat<T>& a) {
    auto norm1 = [](const Mat<T>& m) {
        double best = 0.0;
        for (Index j = 0; j < m.cols(); ++j) {
            double s = 0.0;
            for (Index i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
            best = std::max(best, s);
        }
        return best;
    };
    try {
        Lu<T> lu(a);
        return norm1(a) * norm1(lu.inverse());
    } catch (const SingularMatrixError&) {
        return std::numeric_limits<double>::infinity();
    }
}

template double condition_1<double>(const RMat&);
template double condition_1<Complex>(const CMat&);

}  // namespace lradi

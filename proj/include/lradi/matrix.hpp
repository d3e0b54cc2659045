#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lradi {

using Complex = std::complex<double>;
using Index = std::ptrdiff_t;

/// Dense column-major matrix. Real matrices use T = double, complex ones
/// T = Complex; the solver keeps everything real except where the algebra
/// genuinely needs complex arithmetic.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(Index rows, Index cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols), T{}) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    }

    static Mat zero(Index rows, Index cols) { return Mat(rows, cols); }
    static Mat identity(Index n) {
        Mat m(n, n);
        for (Index i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(Index i, Index j) { return a_[static_cast<size_t>(j * rows_ + i)]; }
    const T& operator()(Index i, Index j) const { return a_[static_cast<size_t>(j * rows_ + i)]; }

    T* data() { return a_.data(); }
    const T* data() const { return a_.data(); }
    T* col(Index j) { return a_.data() + j * rows_; }
    const T* col(Index j) const { return a_.data() + j * rows_; }

    /// Copy of columns [j0, j0+w).
    Mat cols_range(Index j0, Index w) const {
        Mat out(rows_, w);
        for (Index j = 0; j < w; ++j)
            for (Index i = 0; i < rows_; ++i) out(i, j) = (*this)(i, j0 + j);
        return out;
    }

    void append_cols(const Mat& b) {
        if (empty() && cols_ == 0 && rows_ == 0) {
            *this = b;
            return;
        }
        if (b.rows() != rows_) throw std::invalid_argument("append_cols: row mismatch");
        a_.insert(a_.end(), b.a_.begin(), b.a_.end());
        cols_ += b.cols();
    }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<T> a_;
};

using RMat = Mat<double>;
using CMat = Mat<Complex>;

CMat to_complex(const RMat& a);
RMat real_part(const CMat& a);
RMat imag_part(const CMat& a);
CMat conjugate(const CMat& a);

RMat transpose(const RMat& a);
CMat transpose(const CMat& a);
CMat conj_transpose(const CMat& a);

double frobenius_norm(const RMat& a);
double frobenius_norm(const CMat& a);
double max_abs(const RMat& a);
double max_abs(const CMat& a);
/// Largest |Im entry|; 0 for empty.
double max_abs_imag(const CMat& a);
bool all_finite(const RMat& a);
bool all_finite(const CMat& a);

RMat operator+(const RMat& a, const RMat& b);
RMat operator-(const RMat& a, const RMat& b);
CMat operator+(const CMat& a, const CMat& b);
CMat operator-(const CMat& a, const CMat& b);
RMat operator*(double s, const RMat& a);
CMat operator*(const Complex& s, const CMat& a);

/// 2-norm of a column vector stored as an n-by-1 matrix.
double vector_norm(const RMat& v);
double vector_norm(const CMat& v);

}  // namespace lradi

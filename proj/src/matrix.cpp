#include "lradi/matrix.hpp"

#include <cmath>

namespace lradi {

CMat to_complex(const RMat& a) {
    CMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = Complex(a(i, j), 0.0);
    return out;
}

RMat real_part(const CMat& a) {
    RMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = a(i, j).real();
    return out;
}

RMat imag_part(const CMat& a) {
    RMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = a(i, j).imag();
    return out;
}

CMat conjugate(const CMat& a) {
    CMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = std::conj(a(i, j));
    return out;
}

RMat transpose(const RMat& a) {
    RMat out(a.cols(), a.rows());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(j, i) = a(i, j);
    return out;
}

CMat transpose(const CMat& a) {
    CMat out(a.cols(), a.rows());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(j, i) = a(i, j);
    return out;
}

CMat conj_transpose(const CMat& a) {
    CMat out(a.cols(), a.rows());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(j, i) = std::conj(a(i, j));
    return out;
}

template <class T>
static double fro_impl(const Mat<T>& a) {
    double s = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) s += std::norm(Complex(a(i, j)));
    return std::sqrt(s);
}

double frobenius_norm(const RMat& a) { return fro_impl(a); }
double frobenius_norm(const CMat& a) { return fro_impl(a); }

double max_abs(const RMat& a) {
    double m = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double max_abs(const CMat& a) {
    double m = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double max_abs_imag(const CMat& a) {
    double m = 0.0;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j).imag()));
    return m;
}

bool all_finite(const RMat& a) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j))) return false;
    return true;
}

bool all_finite(const CMat& a) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

template <class T>
static Mat<T> add_impl(const Mat<T>& a, const Mat<T>& b, double sign) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("dimension mismatch");
    Mat<T> out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = a(i, j) + T(sign) * b(i, j);
    return out;
}

RMat operator+(const RMat& a, const RMat& b) { return add_impl(a, b, 1.0); }
RMat operator-(const RMat& a, const RMat& b) { return add_impl(a, b, -1.0); }
CMat operator+(const CMat& a, const CMat& b) { return add_impl(a, b, 1.0); }
CMat operator-(const CMat& a, const CMat& b) { return add_impl(a, b, -1.0); }

RMat operator*(double s, const RMat& a) {
    RMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = s * a(i, j);
    return out;
}

CMat operator*(const Complex& s, const CMat& a) {
    CMat out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = s * a(i, j);
    return out;
}

double vector_norm(const RMat& v) { return frobenius_norm(v); }
double vector_norm(const CMat& v) { return frobenius_norm(v); }

}  // namespace lradi

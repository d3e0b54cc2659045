#pragma once

#include <random>

#include "lradi/kernels.hpp"
#include "lradi/matrix.hpp"

namespace lradi::testsupport {

inline RMat random_matrix(Index rows, Index cols, std::mt19937& gen, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    RMat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(gen);
    return m;
}

inline CMat random_cmatrix(Index rows, Index cols, std::mt19937& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CMat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(dist(gen), dist(gen));
    return m;
}

inline double rel_diff(const RMat& a, const RMat& b) {
    const double ref = frobenius_norm(a);
    return frobenius_norm(a - b) / (ref > 0 ? ref : 1.0);
}

inline double rel_diff(const CMat& a, const CMat& b) {
    const double ref = frobenius_norm(a);
    return frobenius_norm(a - b) / (ref > 0 ? ref : 1.0);
}

}  // namespace lradi::testsupport

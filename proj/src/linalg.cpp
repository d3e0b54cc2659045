#include "lradi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lradi {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

bool eig_value_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    const double ia = std::abs(a.imag());
    const double ib = std::abs(b.imag());
    if (ia != ib) return ia < ib;
    return a.imag() > b.imag();
}

void sort_eig_values(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), eig_value_less);
}

RMat orthonormal_columns(const RMat& v, double rank_tol) {
    const Index n = v.rows();
    double ref = 0.0;
    for (Index j = 0; j < v.cols(); ++j) {
        double norm = 0.0;
        for (Index i = 0; i < n; ++i) norm += v(i, j) * v(i, j);
        ref = std::max(ref, std::sqrt(norm));
    }
    RMat q(n, 0);
    if (ref == 0.0) return q;
    std::vector<RMat> kept;
    for (Index j = 0; j < v.cols(); ++j) {
        RMat col(n, 1);
        for (Index i = 0; i < n; ++i) col(i, 0) = v(i, j);
        for (int sweep = 0; sweep < 2; ++sweep)
            for (const RMat& u : kept) {
                double dot = 0.0;
                for (Index i = 0; i < n; ++i) dot += u(i, 0) * col(i, 0);
                for (Index i = 0; i < n; ++i) col(i, 0) -= dot * u(i, 0);
            }
        const double norm = frobenius_norm(col);
        if (norm <= rank_tol * ref) continue;
        kept.push_back((1.0 / norm) * col);
    }
    q = RMat(n, static_cast<Index>(kept.size()));
    for (Index j = 0; j < q.cols(); ++j)
        for (Index i = 0; i < n; ++i) q(i, j) = kept[j](i, 0);
    return q;
}

void phase_normalize(CMat& v) {
    Index k = 0;
    double best = -1.0;
    for (Index i = 0; i < v.rows(); ++i) {
        const double m = std::abs(v(i, 0));
        if (m > best) { best = m; k = i; }
    }
    if (best <= 0.0) return;
    const Complex phase = std::conj(v(k, 0)) / best;
    for (Index i = 0; i < v.rows(); ++i) v(i, 0) *= phase;
    v(k, 0) = Complex(std::abs(v(k, 0)), 0.0);  // kill rounding residue
}

// ---- real symmetric eigensolver (tridiagonalize + implicit QL) ----------

static void tridiagonalize(RMat& a, std::vector<double>& d, std::vector<double>& e) {
    const Index n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (Index i = n - 1; i >= 1; --i) {
        const Index l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (Index k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (Index k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (Index j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (Index k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (Index k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (Index j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (Index k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    // accumulate the transformation in a
    for (Index i = 0; i < n; ++i) {
        const Index l = i;
        if (d[i] != 0.0) {
            for (Index j = 0; j < l; ++j) {
                double g = 0.0;
                for (Index k = 0; k < l; ++k) g += a(i, k) * a(k, j);
                for (Index k = 0; k < l; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (Index j = 0; j < l; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

// implicit-shift QL on a symmetric tridiagonal; z accumulates rotations when
// non-null
static void tridiag_ql(std::vector<double>& d, std::vector<double>& e, RMat* z) {
    const Index n = static_cast<Index>(d.size());
    for (Index i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (Index l = 0; l < n; ++l) {
        int iter = 0;
        Index m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("symmetric eigenvalue iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (Index i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (Index k = 0; k < z->rows(); ++k) {
                            f = (*z)(k, i + 1);
                            (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
                            (*z)(k, i) = c * (*z)(k, i) - s * f;
                        }
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

SymmetricEig eig_symmetric(const RMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_symmetric: square matrix required");
    if (!all_finite(a)) throw std::invalid_argument("eig_symmetric: non-finite entries");
    const Index n = a.rows();
    SymmetricEig out;
    if (n == 0) { out.vectors = RMat(0, 0); return out; }
    RMat work(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) work(i, j) = 0.5 * (a(i, j) + a(j, i));
    std::vector<double> d, e;
    if (n == 1) {
        out.values = {work(0, 0)};
        out.vectors = RMat::identity(1);
        return out;
    }
    tridiagonalize(work, d, e);
    tridiag_ql(d, e, &work);
    // sort ascending, reorder columns
    std::vector<Index> idx(n);
    for (Index i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](Index x, Index y) { return d[x] < d[y]; });
    out.values.resize(n);
    out.vectors = RMat(n, n);
    for (Index j = 0; j < n; ++j) {
        out.values[j] = d[idx[j]];
        for (Index i = 0; i < n; ++i) out.vectors(i, j) = work(i, idx[j]);
    }
    return out;
}

std::vector<double> eig_symmetric_values(const RMat& a) {
    const Index n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {a(0, 0)};
    RMat work(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) work(i, j) = 0.5 * (a(i, j) + a(j, i));
    std::vector<double> d, e;
    tridiagonalize(work, d, e);
    tridiag_ql(d, e, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

// ---- complex Hessenberg-QR ------------------------------------------------

namespace {

struct Givens {
    double c;
    Complex s;
    Index k;
};

inline Givens make_givens(Complex a, Complex b, Index k) {
    Givens g{1.0, Complex(0.0, 0.0), k};
    const double aa = std::abs(a), bb = std::abs(b);
    if (bb == 0.0) return g;
    const double d = std::hypot(aa, bb);
    if (aa == 0.0) {
        g.c = 0.0;
        g.s = std::conj(b) / bb;
    } else {
        g.c = aa / d;
        g.s = (a / aa) * std::conj(b) / d;
    }
    return g;
}

inline void apply_left(CMat& h, const Givens& g, Index jlo, Index jhi) {
    for (Index j = jlo; j <= jhi; ++j) {
        const Complex x = h(g.k, j);
        const Complex y = h(g.k + 1, j);
        h(g.k, j) = g.c * x + g.s * y;
        h(g.k + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
}

inline void apply_right(CMat& h, const Givens& g, Index ilo, Index ihi) {
    for (Index i = ilo; i <= ihi; ++i) {
        const Complex x = h(i, g.k);
        const Complex y = h(i, g.k + 1);
        h(i, g.k) = g.c * x + std::conj(g.s) * y;
        h(i, g.k + 1) = -g.s * x + g.c * y;
    }
}

// eigenvalues of [[a, b], [c, d]], larger-magnitude root computed first, the
// other recovered from the determinant to dodge cancellation
std::pair<Complex, Complex> eig2x2_values(Complex a, Complex b, Complex c, Complex d) {
    const Complex tr = a + d;
    const Complex det = a * d - b * c;
    const Complex q = 0.5 * tr;
    const Complex r = std::sqrt(q * q - det);
    Complex l1 = q + r;
    Complex l2 = q - r;
    if (std::abs(l1) >= std::abs(l2)) {
        if (std::abs(l1) > 0.0) l2 = det / l1;
    } else {
        if (std::abs(l2) > 0.0) l1 = det / l2;
    }
    return {l1, l2};
}

// reduce to Hessenberg form by Householder reflectors, accumulating Q
void hessenberg(CMat& h, CMat& q) {
    const Index n = h.rows();
    q = CMat::identity(n);
    std::vector<Complex> v(static_cast<size_t>(n));
    for (Index k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (Index i = k + 1; i < n; ++i) norm += std::norm(h(i, k));
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        Complex x0 = h(k + 1, k);
        Complex alpha = (std::abs(x0) > 0.0) ? -(x0 / std::abs(x0)) * norm : Complex(-norm, 0.0);
        double vnorm = 0.0;
        for (Index i = k + 1; i < n; ++i) {
            v[i] = h(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm += std::norm(v[i]);
        }
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (Index i = k + 1; i < n; ++i) v[i] /= vnorm;
        // left: H(k+1:, k:) -= 2 v (v^H H)
        for (Index j = k; j < n; ++j) {
            Complex dot(0.0, 0.0);
            for (Index i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
            dot *= 2.0;
            for (Index i = k + 1; i < n; ++i) h(i, j) -= v[i] * dot;
        }
        // right: H(:, k+1:) -= 2 (H v) v^H
        for (Index i = 0; i < n; ++i) {
            Complex dot(0.0, 0.0);
            for (Index j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
            dot *= 2.0;
            for (Index j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
        }
        for (Index i = 0; i < n; ++i) {
            Complex dot(0.0, 0.0);
            for (Index j = k + 1; j < n; ++j) dot += q(i, j) * v[j];
            dot *= 2.0;
            for (Index j = k + 1; j < n; ++j) q(i, j) -= dot * std::conj(v[j]);
        }
        for (Index i = k + 2; i < n; ++i) h(i, k) = Complex(0.0, 0.0);
        h(k + 1, k) = alpha;
    }
}

// Schur form of a Hessenberg matrix by explicit single-shift QR with
// deflation; t becomes upper triangular, q accumulates the similarity
void hessenberg_qr(CMat& t, CMat& q) {
    const Index n = t.rows();
    const double tnorm = std::max(frobenius_norm(t), kEps);
    Index hi = n - 1;
    int iter = 0;
    while (hi > 0) {
        Index lo = hi;
        while (lo > 0) {
            const double off = std::abs(t(lo, lo - 1));
            double ref = std::abs(t(lo - 1, lo - 1)) + std::abs(t(lo, lo));
            if (ref == 0.0) ref = tnorm;
            if (off <= kEps * ref) break;
            --lo;
        }
        if (lo > 0) t(lo, lo - 1) = Complex(0.0, 0.0);
        if (lo == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (iter++ > 200) throw std::runtime_error("eigenvalue iteration failed to converge");
        Complex mu;
        if (iter % 20 == 0) {
            mu = t(hi, hi) + Complex(0.75 * std::abs(t(hi, hi - 1)), 0.0);
        } else {
            auto [l1, l2] = eig2x2_values(t(hi - 1, hi - 1), t(hi - 1, hi), t(hi, hi - 1), t(hi, hi));
            mu = (std::abs(l1 - t(hi, hi)) < std::abs(l2 - t(hi, hi))) ? l1 : l2;
        }
        for (Index i = 0; i < n; ++i) t(i, i) -= mu;
        std::vector<Givens> rots;
        rots.reserve(static_cast<size_t>(hi - lo));
        for (Index k = lo; k < hi; ++k) {
            Givens g = make_givens(t(k, k), t(k + 1, k), k);
            apply_left(t, g, k, n - 1);
            t(k + 1, k) = Complex(0.0, 0.0);
            rots.push_back(g);
        }
        for (const Givens& g : rots) {
            apply_right(t, g, 0, std::min(g.k + 2, n - 1));
            apply_right(q, g, 0, n - 1);
        }
        for (Index i = 0; i < n; ++i) t(i, i) += mu;
    }
}

// right eigenvectors of the triangular factor, back-transformed by q
CMat schur_vectors(const CMat& t, const CMat& q) {
    const Index n = t.rows();
    const double tnorm = std::max(frobenius_norm(t), kEps);
    CMat y(n, n);
    for (Index col = 0; col < n; ++col) {
        const Complex lambda = t(col, col);
        y(col, col) = Complex(1.0, 0.0);
        for (Index k = col - 1; k >= 0; --k) {
            Complex s(0.0, 0.0);
            for (Index j = k + 1; j <= col; ++j) s += t(k, j) * y(j, col);
            Complex denom = t(k, k) - lambda;
            if (std::abs(denom) < kEps * tnorm) denom = Complex(kEps * tnorm, 0.0);
            y(k, col) = -s / denom;
        }
    }
    CMat u = multiply(q, y);
    for (Index j = 0; j < n; ++j) {
        double norm = 0.0;
        for (Index i = 0; i < n; ++i) norm += std::norm(u(i, j));
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (Index i = 0; i < n; ++i) u(i, j) /= norm;
        CMat colv(n, 1);
        for (Index i = 0; i < n; ++i) colv(i, 0) = u(i, j);
        phase_normalize(colv);
        for (Index i = 0; i < n; ++i) u(i, j) = colv(i, 0);
    }
    return u;
}

// unit eigenvector of a 2x2 for a given eigenvalue
CMat vec2_for(const CMat& m, Complex lambda) {
    CMat v(2, 1);
    const Complex r1a = m(0, 0) - lambda, r1b = m(0, 1);
    const Complex r2a = m(1, 0), r2b = m(1, 1) - lambda;
    if (std::abs(r1a) + std::abs(r1b) >= std::abs(r2a) + std::abs(r2b)) {
        if (std::abs(r1a) + std::abs(r1b) == 0.0) {
            v(0, 0) = 1.0;
        } else {
            v(0, 0) = r1b;
            v(1, 0) = -r1a;
        }
    } else {
        v(0, 0) = -r2b;
        v(1, 0) = r2a;
    }
    double norm = std::sqrt(std::norm(v(0, 0)) + std::norm(v(1, 0)));
    if (norm == 0.0) { v(0, 0) = 1.0; norm = 1.0; }
    v(0, 0) /= norm;
    v(1, 0) /= norm;
    phase_normalize(v);
    return v;
}

GeneralEig eig_small_direct(const CMat& m) {
    GeneralEig out;
    const Index n = m.rows();
    if (n == 1) {
        out.values = {m(0, 0)};
        out.vectors = CMat::identity(1);
        return out;
    }
    auto [l1, l2] = eig2x2_values(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    std::vector<Complex> vals{l1, l2};
    sort_eig_values(vals);
    out.values = vals;
    out.vectors = CMat(2, 2);
    for (Index j = 0; j < 2; ++j) {
        CMat v = vec2_for(m, vals[j]);
        out.vectors(0, j) = v(0, 0);
        out.vectors(1, j) = v(1, 0);
    }
    return out;
}

// snap numerically conjugate eigenvalues of a real matrix to exact pairs
void symmetrize_pairs(std::vector<Complex>& vals) {
    std::vector<bool> used(vals.size(), false);
    for (size_t i = 0; i < vals.size(); ++i) {
        if (used[i] || vals[i].imag() == 0.0) continue;
        const double tol = 1e-8 * std::max(1.0, std::abs(vals[i]));
        size_t best = i;
        double bestd = tol;
        for (size_t j = i + 1; j < vals.size(); ++j) {
            if (used[j]) continue;
            const double dd = std::abs(vals[j] - std::conj(vals[i]));
            if (dd < bestd) { bestd = dd; best = j; }
        }
        if (best != i) {
            const Complex mean = 0.5 * (vals[i] + std::conj(vals[best]));
            vals[i] = mean;
            vals[best] = std::conj(mean);
            used[i] = used[best] = true;
        } else {
            vals[i] = Complex(vals[i].real(), 0.0);  // stray imaginary residue
            used[i] = true;
        }
    }
}

}  // namespace

GeneralEig eig_general(const CMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_general: square matrix required");
    if (!all_finite(m)) throw std::invalid_argument("eig_general: non-finite entries");
    const Index n = m.rows();
    GeneralEig out;
    if (n == 0) { out.vectors = CMat(0, 0); return out; }
    if (n <= 2) return eig_small_direct(m);
    CMat t = m, q;
    hessenberg(t, q);
    hessenberg_qr(t, q);
    std::vector<Complex> vals(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) vals[i] = t(i, i);
    CMat u = schur_vectors(t, q);
    // sort values and columns together
    std::vector<Index> idx(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) { return eig_value_less(vals[a], vals[b]); });
    out.values.resize(static_cast<size_t>(n));
    out.vectors = CMat(n, n);
    for (Index j = 0; j < n; ++j) {
        out.values[j] = vals[idx[j]];
        for (Index i = 0; i < n; ++i) out.vectors(i, j) = u(i, idx[j]);
    }
    return out;
}

GeneralEig eig_general(const RMat& m) {
    const Index n = m.rows();
    if (n <= 2) {
        GeneralEig out = eig_general(to_complex(m));
        if (n == 2 && out.values[0].imag() != 0.0) {
            // exact conjugate structure for a real 2x2 pair
            const Complex lp(out.values[1].real(), std::abs(out.values[1].imag()));
            out.values[0] = lp;
            out.values[1] = std::conj(lp);
            CMat mc = to_complex(m);
            CMat v = vec2_for(mc, lp);
            out.vectors(0, 0) = v(0, 0);
            out.vectors(1, 0) = v(1, 0);
            out.vectors(0, 1) = std::conj(v(0, 0));
            out.vectors(1, 1) = std::conj(v(1, 0));
        }
        return out;
    }
    GeneralEig out = eig_general(to_complex(m));
    symmetrize_pairs(out.values);
    std::vector<Index> order(out.values.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return eig_value_less(out.values[a], out.values[b]); });
    GeneralEig sorted;
    sorted.values.resize(out.values.size());
    sorted.vectors = CMat(n, n);
    for (Index j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        for (Index i = 0; i < n; ++i) sorted.vectors(i, j) = out.vectors(i, order[j]);
    }
    return sorted;
}

std::vector<Complex> eig_values(const CMat& m) {
    const Index n = m.rows();
    if (n == 0) return {};
    if (n <= 2) return eig_small_direct(m).values;
    CMat t = m, q;
    hessenberg(t, q);
    hessenberg_qr(t, q);
    std::vector<Complex> vals(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) vals[i] = t(i, i);
    sort_eig_values(vals);
    return vals;
}

std::vector<Complex> eig_values(const RMat& m) {
    std::vector<Complex> vals = eig_values(to_complex(m));
    symmetrize_pairs(vals);
    sort_eig_values(vals);
    return vals;
}

// ---- spec-facing operations ------------------------------------------------

EigenDecomposition small_eig(const CMat& m, const CMat& b) {
    if (m.rows() != m.cols()) throw std::invalid_argument("small_eig: square matrix required");
    if (b.rows() != m.rows()) throw std::invalid_argument("small_eig: dimension mismatch");
    GeneralEig ge = eig_general(m);
    if (condition_1(ge.vectors) > 1e12) throw std::runtime_error("non-diagonalizable projected matrix");
    EigenDecomposition out;
    out.values = std::move(ge.values);
    out.right_vectors = std::move(ge.vectors);
    CLu lu(out.right_vectors);
    out.btilde = lu.solve(b);
    return out;
}

EigenDecomposition small_eig(const RMat& m, const RMat& b) {
    if (m.rows() != m.cols()) throw std::invalid_argument("small_eig: square matrix required");
    if (b.rows() != m.rows()) throw std::invalid_argument("small_eig: dimension mismatch");
    GeneralEig ge = eig_general(m);
    if (condition_1(ge.vectors) > 1e12) throw std::runtime_error("non-diagonalizable projected matrix");
    EigenDecomposition out;
    out.values = std::move(ge.values);
    out.right_vectors = std::move(ge.vectors);
    CLu lu(out.right_vectors);
    out.btilde = lu.solve(to_complex(b));
    return out;
}

double sym_max_eig(const RMat& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("sym_max_eig: square matrix required");
    if (!all_finite(g)) throw std::invalid_argument("sym_max_eig: non-finite entries");
    const Index n = g.rows();
    if (n == 0) return 0.0;
    if (n == 1) return std::max(0.0, g(0, 0));
    if (n == 2) {
        const double a = g(0, 0), d = g(1, 1);
        const double bsym = 0.5 * (g(0, 1) + g(1, 0));
        const double mid = 0.5 * (a + d);
        const double rad = std::hypot(0.5 * (a - d), bsym);
        return std::max(0.0, mid + rad);
    }
    std::vector<double> vals = eig_symmetric_values(g);
    return std::max(0.0, vals.back());
}

double sym_max_eig(const CMat& g) {
    const Index n = g.rows();
    if (n == 0) return 0.0;
    if (max_abs_imag(g) == 0.0) return sym_max_eig(real_part(g));
    // Hermitian part realified to a 2n x 2n symmetric problem with the same
    // spectrum (doubled multiplicities)
    CMat h(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
    RMat big(2 * n, 2 * n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            big(i, j) = h(i, j).real();
            big(i, j + n) = -h(i, j).imag();
            big(i + n, j) = h(i, j).imag();
            big(i + n, j + n) = h(i, j).real();
        }
    std::vector<double> vals = eig_symmetric_values(big);
    return std::max(0.0, vals.back());
}

CMat cauchy_lyap_solve(const std::vector<Complex>& shifts, const CMat& l) {
    const Index k = static_cast<Index>(shifts.size());
    if (l.cols() != k) throw std::invalid_argument("cauchy_lyap_solve: dimension mismatch");
    for (const Complex& s : shifts)
        if (!(s.real() > 0.0)) throw std::invalid_argument("cauchy_lyap_solve: shifts must have positive real part");
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
            if (std::abs(shifts[i] - shifts[j]) <=
                1e-14 * std::max(std::abs(shifts[i]), std::abs(shifts[j])))
                throw std::runtime_error("diagonal closed form requires distinct shifts");
    CMat g = multiply(l, l, Op::H, Op::N);
    CMat x(k, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < k; ++i)
            x(i, j) = g(i, j) / (std::conj(shifts[i]) + shifts[j]);
    return x;
}

std::atomic<long>& shifted_factorization_count() {
    static std::atomic<long> count{0};
    return count;
}

ShiftedSolver::ShiftedSolver(const RMat& a, const RMat& e, Complex s) : s_(s) {
    const Index n = a.rows();
    if (a.cols() != n || e.rows() != n || e.cols() != n)
        throw std::invalid_argument("shifted_solve: A and E must be square of equal size");
    shifted_factorization_count()++;
    try {
        if (s.imag() == 0.0) {
            RMat m(n, n);
            for (Index j = 0; j < n; ++j)
                for (Index i = 0; i < n; ++i) m(i, j) = a(i, j) - s.real() * e(i, j);
            rlu_.emplace(std::move(m));
        } else {
            CMat m(n, n);
            for (Index j = 0; j < n; ++j)
                for (Index i = 0; i < n; ++i) m(i, j) = Complex(a(i, j), 0.0) - s * Complex(e(i, j), 0.0);
            clu_.emplace(std::move(m));
        }
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("shift coincides with generalized eigenvalue");
    }
}

CMat ShiftedSolver::solve(const CMat& rhs) const {
    if (clu_) return clu_->solve(rhs);
    RMat re = rlu_->solve(real_part(rhs));
    RMat im = rlu_->solve(imag_part(rhs));
    CMat out(re.rows(), re.cols());
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) out(i, j) = Complex(re(i, j), im(i, j));
    return out;
}

RMat ShiftedSolver::solve_real(const RMat& rhs) const {
    if (!rlu_) throw std::logic_error("solve_real requires a real shift");
    return rlu_->solve(rhs);
}

CMat shifted_solve(const RMat& a, const RMat& e, Complex s, const CMat& rhs) {
    if (rhs.rows() != a.rows()) throw std::invalid_argument("shifted_solve: dimension mismatch");
    ShiftedSolver solver(a, e, s);
    return solver.solve(rhs);
}

// ---- dense Lyapunov solves ---------------------------------------------

namespace {

RMat lyap_residual(const RMat& a, const RMat& e, const RMat& p, const RMat& bbt) {
    RMat ape = multiply(multiply(a, p), e, Op::N, Op::T);
    RMat epa = multiply(multiply(e, p), a, Op::N, Op::T);
    return ape + epa + bbt;
}

void check_lyap_result(const RMat& a, const RMat& e, const RMat& p, const RMat& bbt) {
    const double rhs_norm = frobenius_norm(bbt);
    const double res = frobenius_norm(lyap_residual(a, e, p, bbt));
    if (res > 1e-8 * rhs_norm)
        throw std::runtime_error("dense Lyapunov solve failed the residual check");
}

}  // namespace

RMat dense_lyap_solve_kron(const RMat& a, const RMat& e, const RMat& b) {
    const Index n = a.rows();
    RMat bbt = multiply(b, b, Op::N, Op::T);
    RMat k(n * n, n * n);
#pragma omp parallel for schedule(static)
    for (Index col = 0; col < n * n; ++col) {
        const Index kcol = col / n;   // column index into P
        const Index krow = col % n;   // row index into P
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i)
                k(j * n + i, col) = e(j, kcol) * a(i, krow) + a(j, kcol) * e(i, krow);
    }
    RMat rhs(n * n, 1);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) rhs(j * n + i, 0) = -bbt(i, j);
    RMat x;
    try {
        RLu lu(std::move(k));
        x = lu.solve(rhs);
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("singular Lyapunov operator: pencil eigenvalues symmetric about the imaginary axis");
    }
    RMat p(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) p(i, j) = x(j * n + i, 0);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double v = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = v;
            p(j, i) = v;
        }
    check_lyap_result(a, e, p, bbt);
    return p;
}

RMat dense_lyap_solve(const RMat& a, const RMat& e, const RMat& b) {
    const Index n = a.rows();
    if (a.cols() != n || e.rows() != n || e.cols() != n || b.rows() != n)
        throw std::invalid_argument("dense_lyap_solve: dimension mismatch");
    if (n > 300) throw std::invalid_argument("dense_lyap_solve: problem too large (n > 300)");
    if (max_abs(b) == 0.0) return RMat(n, n);
    if (n <= 40) return dense_lyap_solve_kron(a, e, b);

    RMat bbt = multiply(b, b, Op::N, Op::T);
    bool sym_std = true;
    const double anorm = max_abs(a);
    for (Index j = 0; j < n && sym_std; ++j)
        for (Index i = 0; i < n; ++i) {
            const double eij = (i == j) ? 1.0 : 0.0;
            if (e(i, j) != eij || std::abs(a(i, j) - a(j, i)) > 1e-13 * anorm) {
                sym_std = false;
                break;
            }
        }
    RMat p(n, n);
    if (sym_std) {
        SymmetricEig se = eig_symmetric(a);
        RMat g = multiply(se.vectors, b, Op::T, Op::N);  // Q^T B
        RMat ggt = multiply(g, g, Op::N, Op::T);
        RMat y(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
                const double den = se.values[i] + se.values[j];
                if (std::abs(den) <= 1e-14 * (std::abs(se.values[i]) + std::abs(se.values[j])))
                    throw std::runtime_error("singular Lyapunov operator: pencil eigenvalues symmetric about the imaginary axis");
                y(i, j) = -ggt(i, j) / den;
            }
        p = multiply(multiply(se.vectors, y), se.vectors, Op::N, Op::T);
    } else {
        RLu elu(e);
        RMat m = elu.solve(a);
        RMat btil = elu.solve(b);
        GeneralEig ge = eig_general(m);
        CLu ulu(ge.vectors);
        CMat w = ulu.solve(to_complex(btil));
        CMat wwt = multiply(w, transpose(w));
        CMat y(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) {
                const Complex den = ge.values[i] + ge.values[j];
                if (std::abs(den) <= 1e-13 * (std::abs(ge.values[i]) + std::abs(ge.values[j])))
                    throw std::runtime_error("singular Lyapunov operator: pencil eigenvalues symmetric about the imaginary axis");
                y(i, j) = -wwt(i, j) / den;
            }
        CMat pc = multiply(multiply(ge.vectors, y), transpose(ge.vectors));
        p = real_part(pc);
    }
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double v = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = v;
            p(j, i) = v;
        }
    check_lyap_result(a, e, p, bbt);
    return p;
}

}  // namespace lradi

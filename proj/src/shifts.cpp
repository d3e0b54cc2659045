#include "lradi/shifts.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lradi {

namespace {

constexpr double kRealShiftTol = 1e-12;

double rel_change(const std::vector<Complex>& now, const std::vector<Complex>& prev) {
    if (now.size() != prev.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (size_t i = 0; i < now.size(); ++i)
        worst = std::max(worst, std::abs(now[i] - prev[i]) / std::max(std::abs(prev[i]), 1e-300));
    return worst;
}

bool usable_ritz(const Complex& d) { return std::abs(d.real()) > kRealShiftTol * std::abs(d); }

}  // namespace

ShiftPair::ShiftPair(Complex shift, CMat direction) : s(shift), b(std::move(direction)) {
    if (!(s.real() > 0.0)) throw std::invalid_argument("shift must have positive real part");
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw std::invalid_argument("non-finite shift");
    if (b.cols() != 1 || b.rows() < 1) throw std::invalid_argument("tangential direction must be a column vector");
    if (!all_finite(b)) throw std::invalid_argument("non-finite tangential direction");
    const double norm = vector_norm(b);
    if (norm == 0.0) throw std::invalid_argument("tangential direction must be nonzero");
    b = (Complex(1.0 / norm, 0.0)) * b;
    phase_normalize(b);
    // scrub rounding residue so real directions are exactly real
    for (Index i = 0; i < b.rows(); ++i)
        if (std::abs(b(i, 0).imag()) <= 1e-15) b(i, 0) = Complex(b(i, 0).real(), 0.0);
}

bool ShiftPair::is_real() const { return std::abs(s.imag()) <= kRealShiftTol * std::abs(s); }

bool ShiftPair::direction_is_real() const { return max_abs_imag(b) == 0.0; }

RMat ShiftPair::direction_real() const {
    if (max_abs_imag(b) > 1e-12) throw std::runtime_error("real shift requires a real tangential direction");
    return real_part(b);
}

// ---- projection ----------------------------------------------------------

namespace {

RMat realify_basis(const CMat& v) {
    std::vector<RMat> cols;
    const Index n = v.rows();
    for (Index j = 0; j < v.cols(); ++j) {
        RMat re(n, 1), im(n, 1);
        double imax = 0.0, cmax = 0.0;
        for (Index i = 0; i < n; ++i) {
            re(i, 0) = v(i, j).real();
            im(i, 0) = v(i, j).imag();
            imax = std::max(imax, std::abs(v(i, j).imag()));
            cmax = std::max(cmax, std::abs(v(i, j)));
        }
        cols.push_back(re);
        if (imax > 1e-13 * std::max(cmax, 1e-300)) cols.push_back(im);
    }
    // A conjugate pair contributes [Re, Im] twice; keep the first occurrence.
    RMat out(n, 0);
    for (const RMat& c : cols) {
        bool dup = false;
        for (Index j = 0; j < out.cols() && !dup; ++j) {
            double diff_p = 0.0, diff_m = 0.0, ref = 0.0;
            for (Index i = 0; i < n; ++i) {
                diff_p = std::max(diff_p, std::abs(out(i, j) - c(i, 0)));
                diff_m = std::max(diff_m, std::abs(out(i, j) + c(i, 0)));
                ref = std::max(ref, std::abs(out(i, j)));
            }
            dup = std::min(diff_p, diff_m) <= 1e-12 * std::max(ref, 1e-300);
        }
        if (!dup) out.append_cols(c);
    }
    return out;
}

RitzData project_core(const LyapunovProblem& p, const RMat& bperp, const RMat& v) {
    const Index w = v.cols();
    if (w < 1 || w > 2) throw std::invalid_argument("project_pair: basis must have 1 or 2 columns");
    if (v.rows() != p.n()) throw std::invalid_argument("project_pair: dimension mismatch");
    // independence: smallest singular value of V at least 1e-12 times largest
    RMat g = multiply(v, v, Op::T, Op::N);
    if (w == 2) {
        const double mid = 0.5 * (g(0, 0) + g(1, 1));
        const double rad = std::hypot(0.5 * (g(0, 0) - g(1, 1)), 0.5 * (g(0, 1) + g(1, 0)));
        const double smax = mid + rad, smin = std::max(mid - rad, 0.0);
        if (smin <= 1e-24 * smax) throw std::runtime_error("rank-deficient projection basis");
    } else if (g(0, 0) == 0.0) {
        throw std::runtime_error("rank-deficient projection basis");
    }
    RMat vev = multiply(multiply(v, p.e, Op::T, Op::N), v);
    RMat vav = multiply(multiply(v, p.a, Op::T, Op::N), v);
    RMat vb = multiply(v, bperp, Op::T, Op::N);
    RitzData rd;
    try {
        RLu lu(vev);
        rd.aj = lu.solve(vav);
        rd.bj = lu.solve(vb);
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("singular projected E");
    }
    EigenDecomposition ed = small_eig(rd.aj, rd.bj);
    rd.d = std::move(ed.values);
    rd.btilde = std::move(ed.btilde);
    rd.v = v;
    return rd;
}

}  // namespace

RitzData project_pair(const LyapunovProblem& p, const RMat& bperp, const RMat& v) {
    return project_core(p, bperp, v);
}

RitzData project_pair(const LyapunovProblem& p, const RMat& bperp, const CMat& v) {
    if (max_abs_imag(v) == 0.0) return project_core(p, bperp, real_part(v));
    return project_core(p, bperp, realify_basis(v));
}

// ---- tangential Krylov basis ----------------------------------------------

CMat tangential_krylov_basis_raw(const LyapunovProblem& p, const RMat& bperp, const std::vector<Complex>& d,
                                 const CMat& btilde) {
    const Index k = static_cast<Index>(d.size());
    if (k < 1 || k > 2) throw std::invalid_argument("tangential basis: need 1 or 2 Ritz values");
    if (btilde.rows() != k || btilde.cols() != bperp.cols())
        throw std::invalid_argument("tangential basis: dimension mismatch");
    const Index n = p.n();
    CMat v(n, k);
    auto rhs_for = [&](Index ell) {
        CMat r(bperp.cols(), 1);
        for (Index i = 0; i < bperp.cols(); ++i) r(i, 0) = std::conj(btilde(ell, i));
        return multiply(to_complex(bperp), r);
    };
    const bool conj_pair = k == 2 && d[0].imag() != 0.0 && d[1] == std::conj(d[0]);
    for (Index ell = 0; ell < k; ++ell) {
        if (conj_pair && ell == 1) {
            for (Index i = 0; i < n; ++i) v(i, 1) = std::conj(v(i, 0));
            break;
        }
        ShiftedSolver solver(p.a, p.e, -d[ell]);
        CMat col = solver.solve(rhs_for(ell));
        for (Index i = 0; i < n; ++i) v(i, ell) = col(i, 0);
    }
    return v;
}

CMat tangential_krylov_basis(const LyapunovProblem& p, const RMat& bperp, const std::vector<Complex>& d,
                             const CMat& btilde) {
    CMat v = tangential_krylov_basis_raw(p, bperp, d, btilde);
    for (Index j = 0; j < v.cols(); ++j) {
        double norm = 0.0;
        for (Index i = 0; i < v.rows(); ++i) norm += std::norm(v(i, j));
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (Index i = 0; i < v.rows(); ++i) v(i, j) /= norm;
    }
    return v;
}

// ---- smallest-magnitude eigenvalues ----------------------------------------

SmallestEigs smallest_generalized_eigs(const LyapunovProblem& p, Index count) {
    const Index n = p.n();
    if (count < 1 || count > n) throw std::invalid_argument("smallest_generalized_eigs: bad count");
    SmallestEigs out;
    if (n == 1) {
        out.values = {Complex(p.a(0, 0) / p.e(0, 0), 0.0)};
        out.vectors = CMat::identity(1);
        out.converged = true;
        return out;
    }
    ShiftedSolver ainv(p.a, p.e, Complex(0.0, 0.0));  // factors A once

    auto seed_col = [&](Index j) {
        RMat c(n, 1);
        for (Index i = 0; i < n; ++i) c(i, 0) = std::sin(0.7 * static_cast<double>((i + 1) * (j + 2)));
        return c;
    };

    Index k = count;
    RMat v(n, 0);
    for (Index j = 0; j < k; ++j) v.append_cols(seed_col(j));
    v = orthonormal_columns(v);

    std::vector<Complex> prev;
    CMat ritz_vectors;
    bool escalated = false;
    const int max_iters = 500;
    for (int it = 1; it <= max_iters; ++it) {
        RMat w = ainv.solve_real(multiply(p.e, v));
        v = orthonormal_columns(w);
        while (v.cols() < k) {  // restore collapsed directions
            RMat patched = v;
            patched.append_cols(seed_col(v.cols() + 17));
            v = orthonormal_columns(patched);
        }
        RMat ap = multiply(multiply(v, p.a, Op::T, Op::N), v);
        RMat ep = multiply(multiply(v, p.e, Op::T, Op::N), v);
        RLu elu(ep);
        GeneralEig ge = eig_general(elu.solve(ap));
        // sort by magnitude, deterministic tie-break
        std::vector<Index> idx(ge.values.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Index>(i);
        std::sort(idx.begin(), idx.end(), [&](Index x, Index y) {
            const double mx = std::abs(ge.values[x]), my = std::abs(ge.values[y]);
            if (mx != my) return mx < my;
            return eig_value_less(ge.values[x], ge.values[y]);
        });
        std::vector<Complex> vals(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) vals[i] = ge.values[idx[i]];
        CMat u(ge.vectors.rows(), static_cast<Index>(idx.size()));
        for (Index j = 0; j < u.cols(); ++j)
            for (Index i = 0; i < u.rows(); ++i) u(i, j) = ge.vectors(i, idx[j]);
        ritz_vectors = multiply(to_complex(v), u);
        if (!prev.empty() && rel_change(vals, prev) < 1e-10) {
            out.converged = true;
            prev = std::move(vals);
            break;
        }
        const bool stalled = it >= 50 && !escalated && k < n;
        if (stalled) {
            escalated = true;
            ++k;
            RMat grown = v;
            grown.append_cols(seed_col(k + 31));
            v = orthonormal_columns(grown);
            prev.clear();
            continue;
        }
        prev = std::move(vals);
    }
    // return the requested count, extended to close a trailing conjugate pair
    Index take = std::min<Index>(count, static_cast<Index>(prev.size()));
    if (take > 0 && prev[take - 1].imag() != 0.0 && take < static_cast<Index>(prev.size())) {
        bool partner_inside = false;
        for (Index i = 0; i < take - 1; ++i)
            if (std::abs(prev[i] - std::conj(prev[take - 1])) <= 1e-10 * std::abs(prev[i])) partner_inside = true;
        if (!partner_inside &&
            std::abs(prev[take] - std::conj(prev[take - 1])) <= 1e-8 * std::abs(prev[take]))
            ++take;
    }
    out.values.assign(prev.begin(), prev.begin() + take);
    out.vectors = CMat(ritz_vectors.rows(), take);
    for (Index j = 0; j < take; ++j)
        for (Index i = 0; i < ritz_vectors.rows(); ++i) out.vectors(i, j) = ritz_vectors(i, j);
    return out;
}

InitialShift initial_shift(const LyapunovProblem& p) {
    if (max_abs(p.b) == 0.0) throw std::invalid_argument("initial_shift: B is zero");
    SmallestEigs se = smallest_generalized_eigs(p, 1);
    if (se.converged && !se.values.empty() && se.values[0].real() < 0.0) {
        const Complex lambda = se.values[0];
        CMat vv(p.n(), 1);
        for (Index i = 0; i < p.n(); ++i) vv(i, 0) = se.vectors(i, 0);
        RLu elu(p.e);
        CMat einvb = to_complex(elu.solve(p.b));
        CMat brow = multiply(vv, einvb, Op::H, Op::N);  // 1 x m
        CMat b(p.m(), 1);
        for (Index i = 0; i < p.m(); ++i) b(i, 0) = std::conj(brow(0, i));
        if (vector_norm(b) > 0.0) return {ShiftPair(-lambda, std::move(b)), false};
    }
    // stagnation fallback: magnitude from B, direction from the top
    // right-singular vector of B
    RMat btb = multiply(p.b, p.b, Op::T, Op::N);
    SymmetricEig sev = eig_symmetric(btb);
    CMat b(p.m(), 1);
    for (Index i = 0; i < p.m(); ++i) b(i, 0) = sev.vectors(i, p.m() - 1);
    const double mag = frobenius_norm(p.b);
    return {ShiftPair(Complex(mag > 0.0 ? mag : 1.0, 0.0), std::move(b)), true};
}

// ---- IRKA update -----------------------------------------------------------

IrkaResult irka_update(const LyapunovProblem& p, const RMat& bperp, const RMat& zi, double irka_tol,
                       int n_max) {
    if (n_max < 1) throw std::invalid_argument("irka_update: n_max must be at least 1");
    IrkaResult out;
    CMat v = to_complex(zi);
    RitzData rd;
    std::vector<Complex> prev;
    CMat raw;
    bool last_was_solve = false;
    for (int pass = 1; pass <= n_max; ++pass) {
        rd = project_pair(p, bperp, v);
        out.passes = pass;
        bool any_usable = false;
        for (const Complex& d : rd.d) any_usable = any_usable || usable_ritz(d);
        if (!any_usable) throw std::runtime_error("no usable shift");
        if (pass > 1 && rel_change(rd.d, prev) < irka_tol) {
            out.converged = true;
            last_was_solve = false;
            break;
        }
        prev = rd.d;
        raw = tangential_krylov_basis_raw(p, bperp, rd.d, rd.btilde);
        last_was_solve = true;
        v = raw;
        for (Index j = 0; j < v.cols(); ++j) {
            double norm = 0.0;
            for (Index i = 0; i < v.rows(); ++i) norm += std::norm(v(i, j));
            norm = std::sqrt(norm);
            if (norm > 0.0)
                for (Index i = 0; i < v.rows(); ++i) v(i, j) /= norm;
        }
    }
    out.final_basis = raw;

    const Index width = static_cast<Index>(rd.d.size());
    Index first = 0;
    if (!usable_ritz(rd.d[first])) {
        if (width > 1 && usable_ritz(rd.d[1]))
            first = 1;
        else
            throw std::runtime_error("no usable shift");
    }

    auto emit = [&](Index ell, bool allow_reuse) {
        const Complex dval = rd.d[ell];
        Complex s = -dval;
        const bool flipped = !(s.real() > 0.0);
        if (flipped) s = dval;  // right-half-plane Ritz value used directly
        CMat braw(p.m(), 1);
        for (Index i = 0; i < p.m(); ++i) braw(i, 0) = std::conj(rd.btilde(ell, i));
        if (vector_norm(braw) == 0.0) throw std::runtime_error("no usable shift");
        ShiftPair pair(s, braw);
        if (allow_reuse && last_was_solve && !flipped && !raw.empty()) {
            // pair.b = scalar * braw; the same scalar links the raw basis
            // column to the unscaled solve the driver needs
            Index kmax = 0;
            double best = -1.0;
            for (Index i = 0; i < p.m(); ++i)
                if (std::abs(braw(i, 0)) > best) { best = std::abs(braw(i, 0)); kmax = i; }
            const Complex scalar = pair.b(kmax, 0) / braw(kmax, 0);
            CMat y(p.n(), 1);
            for (Index i = 0; i < p.n(); ++i) y(i, 0) = scalar * raw(i, ell);
            out.presolved_y = std::move(y);
        }
        out.pairs.push_back(std::move(pair));
    };

    emit(first, true);
    const bool both_real = width == 2 && !rd.d[0].imag() && !rd.d[1].imag();
    if (both_real && rd.v.cols() == 2) {
        const Index other = 1 - first;
        if (usable_ritz(rd.d[other])) emit(other, false);
    }
    return out;
}

// ---- shift sources ---------------------------------------------------------

StaticShiftSource::StaticShiftSource(std::vector<ShiftPair> pairs) : pairs_(std::move(pairs)) {}

std::optional<NextShift> StaticShiftSource::next(const LyapunovProblem&, const RMat&, const RMat*) {
    if (pairs_.empty()) throw std::runtime_error("static shift source is empty");
    if (idx_ >= pairs_.size()) return std::nullopt;
    return NextShift{pairs_[idx_++], std::nullopt};
}

AdaptiveShiftSource::AdaptiveShiftSource(int n_max, double irka_tol) : n_max_(n_max), irka_tol_(irka_tol) {
    if (n_max < 1) throw std::invalid_argument("adaptive shifts: n_max must be at least 1");
    if (!(irka_tol > 0.0)) throw std::invalid_argument("adaptive shifts: tol must be positive");
}

std::optional<NextShift> AdaptiveShiftSource::next(const LyapunovProblem& p, const RMat& bperp,
                                                   const RMat* last_block) {
    std::optional<NextShift> out;
    if (!queue_.empty()) {
        out.emplace(queue_.front());
        queue_.pop_front();
        return out;
    }
    if (last_block == nullptr) {
        InitialShift init = initial_shift(p);
        initial_fallback_ = init.fallback_used;
        out.emplace(NextShift{std::move(init.pair), std::nullopt});
        return out;
    }
    IrkaResult r = irka_update(p, bperp, *last_block, irka_tol_, n_max_);
    out.emplace(NextShift{r.pairs[0], std::move(r.presolved_y)});
    for (size_t i = 1; i < r.pairs.size(); ++i) queue_.push_back(NextShift{r.pairs[i], std::nullopt});
    return out;
}

// ---- shift file I/O --------------------------------------------------------

std::vector<ShiftPair> load_shift_file(const std::string& path, Index m) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shift file: " + path);
    std::vector<ShiftPair> out;
    std::string line;
    Index lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<double> vals;
        double x;
        while (ss >> x) vals.push_back(x);
        if (vals.empty()) continue;
        if (static_cast<Index>(vals.size()) != 2 + 2 * m)
            throw std::runtime_error("shift file line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(2 + 2 * m) + " values, got " + std::to_string(vals.size()));
        CMat b(m, 1);
        for (Index i = 0; i < m; ++i) b(i, 0) = Complex(vals[2 + 2 * i], vals[3 + 2 * i]);
        out.emplace_back(Complex(vals[0], vals[1]), std::move(b));
    }
    return out;
}

void write_shift_file(const std::string& path, const std::vector<ShiftPair>& pairs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open shift file for writing: " + path);
    out.precision(17);
    out << "# Re(s) Im(s) then Re/Im of each direction entry\n";
    for (const ShiftPair& sp : pairs) {
        out << sp.s.real() << " " << sp.s.imag();
        for (Index i = 0; i < sp.b.rows(); ++i) out << " " << sp.b(i, 0).real() << " " << sp.b(i, 0).imag();
        out << "\n";
    }
}

}  // namespace lradi

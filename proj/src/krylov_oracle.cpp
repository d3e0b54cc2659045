#include "lradi/krylov_oracle.hpp"

#include <cmath>

namespace lradi {

RMat real_checked(const CMat& a, double rel_tol) {
    const double ref = std::max(frobenius_norm(a), 1e-300);
    if (max_abs_imag(a) > rel_tol * ref)
        throw std::runtime_error("matrix expected real has a significant imaginary part");
    return real_part(a);
}

std::vector<ShiftPair> expand_conjugate_pairs(const std::vector<ShiftPair>& pairs) {
    std::vector<ShiftPair> out;
    for (const ShiftPair& sp : pairs) {
        out.push_back(sp);
        if (!sp.is_real()) out.emplace_back(std::conj(sp.s), conjugate(sp.b));
    }
    return out;
}

KrylovData build_tangential_basis(const LyapunovProblem& p, const std::vector<ShiftPair>& pairs) {
    const Index k = static_cast<Index>(pairs.size());
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
            if (std::abs(pairs[i].s - pairs[j].s) <= 1e-14 * std::max(std::abs(pairs[i].s), std::abs(pairs[j].s)))
                throw std::runtime_error("tangential basis requires pairwise distinct shifts");
    KrylovData kd;
    kd.n = p.n();
    kd.m = p.m();
    kd.v = CMat(p.n(), k);
    kd.l = CMat(p.m(), k);
    kd.shifts.reserve(pairs.size());
    CMat bc = to_complex(p.b);
    for (Index j = 0; j < k; ++j) {
        const ShiftPair& sp = pairs[j];
        kd.shifts.push_back(sp.s);
        const Complex w(std::sqrt(2.0 * sp.s.real()), 0.0);
        ShiftedSolver solver(p.a, p.e, sp.s);
        CMat col = solver.solve(multiply(bc, sp.b));
        for (Index i = 0; i < p.n(); ++i) kd.v(i, j) = w * col(i, 0);
        for (Index i = 0; i < p.m(); ++i) kd.l(i, j) = w * sp.b(i, 0);
    }
    return kd;
}

CMat oracle_reduced_solution(const KrylovData& kd) { return cauchy_lyap_solve(kd.shifts, kd.l); }

namespace {

CMat reduced_inverse(const KrylovData& kd) {
    CMat x = oracle_reduced_solution(kd);
    if (condition_1(x) > 1e14) throw std::runtime_error("ill-conditioned reduced solution");
    CLu lu(x);
    return lu.inverse();
}

}  // namespace

CMat krylov_approximant(const KrylovData& kd) {
    if (kd.shifts.empty()) return CMat(kd.n, kd.n);
    CMat xinv = reduced_inverse(kd);
    return multiply(multiply(kd.v, xinv), kd.v, Op::N, Op::H);
}

CMat krylov_residual_factor(const LyapunovProblem& p, const KrylovData& kd) {
    if (kd.shifts.empty()) return to_complex(p.b);
    CMat xinv = reduced_inverse(kd);
    CMat evx = multiply(multiply(to_complex(p.e), kd.v), xinv);
    return to_complex(p.b) + multiply(evx, kd.l, Op::N, Op::H);
}

RestartedOracle krylov_restarted_solution(const LyapunovProblem& p, const std::vector<ShiftPair>& pairs) {
    const Index n = p.n();
    const Index m = p.m();
    RestartedOracle out;
    out.phat = RMat(n, n);
    out.bperp = p.b;
    for (const ShiftPair& sp : pairs) {
        const Index k = sp.is_real() ? 1 : 2;
        const Complex w(std::sqrt(2.0 * sp.s.real()), 0.0);
        ShiftedSolver solver(p.a, p.e, sp.s);
        CMat col = solver.solve(multiply(to_complex(out.bperp), sp.b));
        CMat v(n, k), l(m, k);
        std::vector<Complex> shifts{sp.s};
        for (Index i = 0; i < n; ++i) v(i, 0) = w * col(i, 0);
        for (Index i = 0; i < m; ++i) l(i, 0) = w * sp.b(i, 0);
        if (k == 2) {
            shifts.push_back(std::conj(sp.s));
            for (Index i = 0; i < n; ++i) v(i, 1) = std::conj(v(i, 0));
            for (Index i = 0; i < m; ++i) l(i, 1) = std::conj(l(i, 0));
        }
        CMat x = cauchy_lyap_solve(shifts, l);
        CLu lu(x);
        CMat xinv = lu.inverse();
        CMat phat_inc = multiply(multiply(v, xinv), v, Op::N, Op::H);
        CMat factor_inc = multiply(multiply(multiply(to_complex(p.e), v), xinv), l, Op::N, Op::H);
        // increments are real up to rounding; the reference scale guards the
        // check when an increment nearly cancels
        const double pref = std::max(frobenius_norm(phat_inc), frobenius_norm(out.phat)) + 1e-300;
        const double fref = std::max(frobenius_norm(factor_inc), frobenius_norm(p.b)) + 1e-300;
        if (max_abs_imag(phat_inc) > 1e-9 * pref || max_abs_imag(factor_inc) > 1e-8 * fref)
            throw std::runtime_error("restarted projection route produced a non-real increment");
        out.phat = out.phat + real_part(phat_inc);
        out.bperp = out.bperp + real_part(factor_inc);
    }
    return out;
}

}  // namespace lradi

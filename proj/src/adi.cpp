#include "lradi/adi.hpp"

#include <chrono>
#include <cmath>

#include "lradi/tangential.hpp"

namespace lradi {

double residual_norm(const RMat& bperp) {
    if (bperp.empty()) return 0.0;
    return sym_max_eig(multiply(bperp, bperp, Op::T, Op::N));
}

double residual_identity_gap(const LyapunovProblem& p, const RMat& z, const RMat& bperp) {
    RMat phat = z.cols() > 0 ? multiply(z, z, Op::N, Op::T) : RMat(p.n(), p.n());
    RMat bbt = multiply(p.b, p.b, Op::N, Op::T);
    RMat lhs = multiply(multiply(p.a, phat), p.e, Op::N, Op::T) + multiply(multiply(p.e, phat), p.a, Op::N, Op::T) +
               bbt - multiply(bperp, bperp, Op::N, Op::T);
    return frobenius_norm(lhs) / std::max(frobenius_norm(bbt), 1e-300);
}

std::vector<PlannedStep> plan_shift_list(const std::vector<Complex>& shifts) {
    std::vector<PlannedStep> plan;
    for (size_t i = 0; i < shifts.size(); ++i) {
        const Complex s = shifts[i];
        if (!(s.real() > 0.0)) throw std::invalid_argument("shift must have positive real part");
        if (std::abs(s.imag()) <= 1e-12 * std::abs(s)) {
            plan.push_back({Complex(s.real(), 0.0), false});
            continue;
        }
        if (i + 1 >= shifts.size() || std::abs(shifts[i + 1] - std::conj(s)) > 1e-12 * std::abs(s))
            throw std::invalid_argument("complex shifts must come in adjacent conjugate pairs");
        plan.push_back({s, true});
        ++i;
    }
    return plan;
}

BlockClassicResult block_adi_classic(const LyapunovProblem& p, const std::vector<Complex>& shifts) {
    plan_shift_list(shifts);  // validates positivity and conjugation closure
    const Index n = p.n();
    const Index m = p.m();
    BlockClassicResult out;
    out.z = CMat(n, 0);
    CMat zi;
    for (size_t i = 0; i < shifts.size(); ++i) {
        const Complex s = shifts[i];
        ShiftedSolver solver(p.a, p.e, s);
        if (i == 0) {
            zi = Complex(std::sqrt(2.0 * s.real()), 0.0) * solver.solve(to_complex(p.b));
        } else {
            const Complex sprev = shifts[i - 1];
            CMat w = solver.solve(multiply(to_complex(p.e), zi));
            const Complex coupling = s + std::conj(sprev);
            CMat next(n, m);
            const double ratio = std::sqrt(s.real() / sprev.real());
            for (Index j = 0; j < m; ++j)
                for (Index r = 0; r < n; ++r) next(r, j) = ratio * (zi(r, j) + coupling * w(r, j));
            zi = std::move(next);
        }
        out.z.append_cols(zi);
    }
    CMat phat_c = out.z.cols() > 0 ? multiply(out.z, out.z, Op::N, Op::H) : CMat(n, n);
    const double pnorm = std::max(frobenius_norm(phat_c), 1e-300);
    if (max_abs_imag(phat_c) > 1e-10 * pnorm)
        throw std::runtime_error("classic iteration produced a non-real Gramian");
    out.phat = real_part(phat_c);
    CMat bperp_c = residual_factor_classic(p, out.z, shifts);
    const double bnorm = std::max(frobenius_norm(bperp_c), 1e-300);
    if (max_abs_imag(bperp_c) > 1e-9 * bnorm)
        throw std::runtime_error("classic iteration produced a non-real residual factor");
    out.bperp = real_part(bperp_c);
    return out;
}

CMat residual_factor_classic(const LyapunovProblem& p, const CMat& z, const std::vector<Complex>& shifts) {
    const Index m = p.m();
    const Index k = static_cast<Index>(shifts.size());
    if (z.cols() != m * k) throw std::invalid_argument("dimension mismatch: Z must have m*k columns");
    CMat bperp = to_complex(p.b);
    if (k == 0) return bperp;
    CMat lt(m * k, m);  // L^T stacked
    for (Index blk = 0; blk < k; ++blk) {
        const double w = std::sqrt(2.0 * shifts[blk].real());
        for (Index j = 0; j < m; ++j) lt(blk * m + j, j) = w;
    }
    return bperp + multiply(multiply(to_complex(p.e), z), lt);
}

void block_step_real(const LyapunovProblem& p, AdiState& state, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("shift must have positive real part");
    const double w = std::sqrt(2.0 * s);
    ShiftedSolver solver(p.a, p.e, Complex(s, 0.0));
    RMat zi = w * solver.solve_real(state.bperp);
    state.bperp = state.bperp + w * multiply(p.e, zi);
    state.z.append_cols(zi);
    state.lblocks.push_back(w * RMat::identity(p.m()));
    state.shift_history.emplace_back(s, 0.0);
}

void block_step_pair(const LyapunovProblem& p, AdiState& state, Complex s) {
    const Index n = p.n();
    const Index m = p.m();
    // block directions are the canonical basis, so every column shares the
    // same coefficient triple with b^H conj(b) = 1
    CMat e1(1, 1);
    e1(0, 0) = 1.0;
    ComplexPairCoefficients co = complex_pair_coeffs(ShiftPair(s, e1));
    ShiftedSolver solver(p.a, p.e, s);
    CMat y = Complex(std::sqrt(2.0 * s.real()), 0.0) * solver.solve(to_complex(state.bperp));
    RMat yre = real_part(y), yim = imag_part(y);
    RMat zi(n, 2 * m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i) {
            zi(i, j) = std::sqrt(2.0) / co.gamma * yre(i, j);
            zi(i, m + j) = std::sqrt(2.0) / co.gamma * co.beta *
                           (co.alpha.imag() * yre(i, j) + co.gamma * co.gamma * yim(i, j));
        }
    RMat lblk(m, 2 * m);
    const double w = 2.0 / co.gamma * std::sqrt(s.real());
    for (Index j = 0; j < m; ++j) {
        lblk(j, j) = w;
        lblk(j, m + j) = w * co.beta * co.alpha.imag();
    }
    state.bperp = state.bperp + multiply(multiply(p.e, zi), transpose(lblk));
    state.z.append_cols(zi);
    state.lblocks.push_back(lblk);
    state.shift_history.push_back(s);
}

AdiState block_adi_residual(const LyapunovProblem& p, const std::vector<Complex>& shifts) {
    std::vector<PlannedStep> plan = plan_shift_list(shifts);
    AdiState state;
    state.z = RMat(p.n(), 0);
    state.bperp = p.b;
    for (const PlannedStep& step : plan) {
        if (step.pair)
            block_step_pair(p, state, step.s);
        else
            block_step_real(p, state, step.s.real());
    }
    return state;
}

std::vector<Complex> bladi_next_shift_set(const LyapunovProblem& p, const RMat& last_block) {
    RMat v = orthonormal_columns(last_block);
    if (v.cols() == 0) throw std::runtime_error("adaptive block strategy produced no stable Ritz values");
    RMat vev = multiply(multiply(v, p.e, Op::T, Op::N), v);
    RMat vav = multiply(multiply(v, p.a, Op::T, Op::N), v);
    RMat aj;
    try {
        RLu lu(vev);
        aj = lu.solve(vav);
    } catch (const SingularMatrixError&) {
        throw std::runtime_error("adaptive block strategy produced no stable Ritz values");
    }
    std::vector<Complex> ritz = eig_values(aj);
    std::vector<Complex> next;
    for (const Complex& lam : ritz)
        if (lam.real() < 0.0) next.push_back(-lam);
    sort_eig_values(next);
    if (next.empty()) throw std::runtime_error("adaptive block strategy produced no stable Ritz values");
    return next;
}

namespace {

std::vector<Complex> bladi_initial_set(const LyapunovProblem& p, BladiInit init) {
    if (init == BladiInit::RitzOfB) {
        RMat v = orthonormal_columns(p.b);
        if (v.cols() == 0) throw std::runtime_error("initial projection with B failed; use the smallest-eigenvalue init");
        RMat vev = multiply(multiply(v, p.e, Op::T, Op::N), v);
        RMat vav = multiply(multiply(v, p.a, Op::T, Op::N), v);
        RLu lu(vev);
        std::vector<Complex> ritz = eig_values(lu.solve(vav));
        std::vector<Complex> set;
        double magmax = 0.0;
        for (const Complex& lam : ritz) magmax = std::max(magmax, std::abs(lam));
        for (const Complex& lam : ritz)
            if (lam.real() < 0.0 && std::abs(lam) > 1e-12 * magmax) set.push_back(-lam);
        sort_eig_values(set);
        if (set.empty())
            throw std::runtime_error(
                "initial projection with B produced no usable shifts (zero Ritz values); use the smallest-eigenvalue init");
        return set;
    }
    SmallestEigs se = smallest_generalized_eigs(p, p.m());
    std::vector<Complex> set;
    for (const Complex& lam : se.values)
        if (lam.real() < 0.0) set.push_back(-lam);
    sort_eig_values(set);
    if (set.empty()) throw std::runtime_error("adaptive block strategy produced no stable Ritz values");
    return set;
}

}  // namespace

AdiState bladi_run(const LyapunovProblem& p, const BladiOptions& opt) {
    if (!(opt.tol > 0.0)) throw std::invalid_argument("bladi_run: tol must be positive");
    if (opt.max_iters < 1) throw std::invalid_argument("bladi_run: max_iters must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    AdiState state;
    state.z = RMat(p.n(), 0);
    state.bperp = p.b;
    const double bnorm = residual_norm(p.b);
    state.residual_history.push_back({0, 0, bnorm, elapsed(), Complex(0.0, 0.0)});
    if (bnorm == 0.0) {
        state.converged = true;
        return state;
    }

    std::vector<Complex> set = bladi_initial_set(p, opt.init);
    Index iters = 0;
    while (true) {
        Index block_start = state.z.cols();
        for (const PlannedStep& step : plan_shift_list(set)) {
            if (residual_norm(state.bperp) < opt.tol * bnorm) {
                state.converged = true;
                return state;
            }
            if (iters >= opt.max_iters) return state;
            block_start = state.z.cols();
            if (step.pair)
                block_step_pair(p, state, step.s);
            else
                block_step_real(p, state, step.s.real());
            ++iters;
            state.residual_history.push_back(
                {iters, state.z.cols(), residual_norm(state.bperp), elapsed(), state.shift_history.back()});
            if (opt.per_step) opt.per_step(state);
        }
        if (residual_norm(state.bperp) < opt.tol * bnorm) {
            state.converged = true;
            return state;
        }
        if (iters >= opt.max_iters) return state;
        const RMat last = state.z.cols_range(block_start, state.z.cols() - block_start);
        set = bladi_next_shift_set(p, last);
    }
}

}  // namespace lradi

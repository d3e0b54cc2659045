#include "lradi/tangential.hpp"

#include <chrono>
#include <cmath>

namespace lradi {

ComplexPairCoefficients complex_pair_coeffs(const ShiftPair& sp) {
    if (sp.is_real()) throw std::invalid_argument("complex_pair_coeffs: shift is real");
    Complex bhbbar(0.0, 0.0);  // b^H conj(b) = conj(b^T b)
    for (Index i = 0; i < sp.b.rows(); ++i) bhbbar += std::conj(sp.b(i, 0) * sp.b(i, 0));
    ComplexPairCoefficients co;
    co.alpha = bhbbar * sp.s.real() / std::conj(sp.s);
    const double aa = std::norm(co.alpha);
    if (aa >= 1.0 - 1e-14) throw std::runtime_error("use real-shift path");
    co.beta = 1.0 / std::sqrt(1.0 - aa);
    co.gamma = std::sqrt(1.0 + co.alpha.real());
    return co;
}

namespace {

CMat step_rhs(const RMat& bperp, const CMat& b) { return multiply(to_complex(bperp), b); }

}  // namespace

void tlradi_step_real(const LyapunovProblem& p, AdiState& state, const ShiftPair& sp,
                      const CMat* presolved_y) {
    if (!sp.is_real()) throw std::invalid_argument("tlradi_step_real: complex shift");
    const double s = sp.s.real();
    RMat b = sp.direction_real();
    const double w = std::sqrt(2.0 * s);
    RMat y;
    if (presolved_y) {
        if (max_abs_imag(*presolved_y) > 1e-12 * std::max(max_abs(*presolved_y), 1e-300))
            throw std::invalid_argument("presolved iterate for a real shift must be real");
        y = real_part(*presolved_y);
    } else {
        ShiftedSolver solver(p.a, p.e, Complex(s, 0.0));
        y = solver.solve_real(multiply(state.bperp, b));
    }
    RMat z = w * y;
    state.bperp = state.bperp + w * multiply(multiply(p.e, z), b, Op::N, Op::T);
    state.z.append_cols(z);
    state.lblocks.push_back(w * b);
    state.shift_history.emplace_back(s, 0.0);
}

ComplexStepResult tlradi_step_complex_c(const LyapunovProblem& p, const CMat& bperp, const ShiftPair& sp) {
    ComplexPairCoefficients co = complex_pair_coeffs(sp);
    const Index n = p.n();
    const double w = std::sqrt(2.0 * sp.s.real());
    ShiftedSolver solver(p.a, p.e, sp.s);
    CMat y = Complex(w, 0.0) * solver.solve(multiply(bperp, sp.b));
    ComplexStepResult out;
    out.z_block = CMat(n, 2);
    for (Index i = 0; i < n; ++i) {
        out.z_block(i, 0) = y(i, 0);
        out.z_block(i, 1) = co.beta * (std::conj(y(i, 0)) - co.alpha * y(i, 0));
    }
    out.l_block = CMat(p.m(), 2);
    for (Index i = 0; i < p.m(); ++i) {
        out.l_block(i, 0) = w * sp.b(i, 0);
        out.l_block(i, 1) = w * co.beta * (std::conj(sp.b(i, 0)) - co.alpha * sp.b(i, 0));
    }
    out.bperp = bperp + multiply(multiply(to_complex(p.e), out.z_block), out.l_block, Op::N, Op::H);
    return out;
}

void tlradi_step_complex_r(const LyapunovProblem& p, AdiState& state, const ShiftPair& sp,
                           const CMat* presolved_y) {
    ComplexPairCoefficients co = complex_pair_coeffs(sp);
    const Index n = p.n();
    const Index m = p.m();
    CMat y;
    if (presolved_y) {
        y = *presolved_y;
    } else {
        ShiftedSolver solver(p.a, p.e, sp.s);
        y = solver.solve(step_rhs(state.bperp, sp.b));
    }
    const double w = std::sqrt(2.0 * sp.s.real());
    RMat zi(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double yre = w * y(i, 0).real();
        const double yim = w * y(i, 0).imag();
        zi(i, 0) = std::sqrt(2.0) / co.gamma * yre;
        zi(i, 1) = std::sqrt(2.0) / co.gamma * co.beta * (co.alpha.imag() * yre + co.gamma * co.gamma * yim);
    }
    RMat lblk(m, 2);
    const double lw = 2.0 / co.gamma * std::sqrt(sp.s.real());
    for (Index i = 0; i < m; ++i) {
        const double bre = sp.b(i, 0).real();
        const double bim = sp.b(i, 0).imag();
        lblk(i, 0) = lw * bre;
        lblk(i, 1) = lw * co.beta * (co.alpha.imag() * bre + co.gamma * co.gamma * bim);
    }
    state.bperp = state.bperp + multiply(multiply(p.e, zi), transpose(lblk));
    state.z.append_cols(zi);
    state.lblocks.push_back(lblk);
    state.shift_history.push_back(sp.s);
}

AdiState tlradi_run(const LyapunovProblem& p, ShiftSource& source, const TlradiOptions& opt) {
    if (!(opt.tol > 0.0)) throw std::invalid_argument("tlradi_run: tol must be positive");
    if (opt.max_cols < 1) throw std::invalid_argument("tlradi_run: max_cols must be at least 1");
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

    Index iter = 0;
    Index prev_cols = 0;
    RMat last_block;
    while (true) {
        if (residual_norm(state.bperp) < opt.tol * bnorm) {
            state.converged = true;
            break;
        }
        if (state.z.cols() >= opt.max_cols) break;
        const RMat* last = (iter == 0) ? nullptr : &last_block;
        std::optional<NextShift> nxt = source.next(p, state.bperp, last);
        if (!nxt) break;
        prev_cols = state.z.cols();
        const CMat* pre = nxt->presolved_y ? &*nxt->presolved_y : nullptr;
        if (nxt->pair.is_real())
            tlradi_step_real(p, state, nxt->pair, pre);
        else
            tlradi_step_complex_r(p, state, nxt->pair, pre);
        last_block = state.z.cols_range(prev_cols, state.z.cols() - prev_cols);
        ++iter;
        state.residual_history.push_back(
            {iter, state.z.cols(), residual_norm(state.bperp), elapsed(), state.shift_history.back()});
        if (opt.per_step) opt.per_step(state);
    }
    return state;
}

}  // namespace lradi

#include "lradi/verify.hpp"

#include <cmath>
#include <random>

#include "lradi/krylov_oracle.hpp"

namespace lradi {

namespace {

std::vector<Complex> draw_conj_closed_shifts(std::mt19937& gen, int max_len) {
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_real_distribution<double> re(0.2, 3.0);
    std::uniform_real_distribution<double> im(0.3, 2.0);
    std::bernoulli_distribution coin(0.4);
    const int len = len_dist(gen);
    std::vector<Complex> shifts;
    while (static_cast<int>(shifts.size()) < len) {
        if (coin(gen) && static_cast<int>(shifts.size()) + 2 <= len) {
            const Complex s(re(gen), im(gen));
            shifts.push_back(s);
            shifts.push_back(std::conj(s));
        } else {
            shifts.emplace_back(re(gen), 0.0);
        }
    }
    return shifts;
}

std::vector<ShiftPair> draw_tangential_sequence(std::mt19937& gen, Index m, int max_len) {
    std::uniform_int_distribution<int> len_dist(1, max_len);
    std::uniform_real_distribution<double> re(0.2, 3.0);
    std::uniform_real_distribution<double> im(0.3, 2.0);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<ShiftPair> seq;
    const int len = len_dist(gen);
    for (int i = 0; i < len; ++i) {
        CMat b(m, 1);
        if (coin(gen)) {
            for (Index r = 0; r < m; ++r) b(r, 0) = Complex(entry(gen), entry(gen));
            if (vector_norm(b) == 0.0) b(0, 0) = 1.0;
            seq.emplace_back(Complex(re(gen), im(gen)), std::move(b));
        } else {
            for (Index r = 0; r < m; ++r) b(r, 0) = entry(gen);
            if (vector_norm(b) == 0.0) b(0, 0) = 1.0;
            seq.emplace_back(Complex(re(gen), 0.0), std::move(b));
        }
    }
    return seq;
}

struct Worst {
    double value = 0.0;
    void feed(double v) { value = std::max(value, v); }
};

}  // namespace

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opt) {
    Worst lemma1, thm34, oracle_p, oracle_r, resid, cauchy_sub, dense_sym;
    std::mt19937 gen(opt.seed_base * 7919u + 13u);
    std::uniform_int_distribution<Index> m_dist(1, 4);

    for (int s = 0; s < opt.seeds; ++s) {
        const unsigned seed = opt.seed_base + static_cast<unsigned>(s);
        for (Index n : opt.sizes) {
            const Index m = std::min<Index>(n, m_dist(gen));
            LyapunovProblem p = gen_random_stable(n, m, seed);
            const double bbt_norm = std::max(frobenius_norm(multiply(p.b, p.b, Op::N, Op::T)), 1e-300);

            // classical vs residual-based block iteration
            std::vector<Complex> shifts = draw_conj_closed_shifts(gen, 8);
            BlockClassicResult classic = block_adi_classic(p, shifts);
            AdiState block = block_adi_residual(p, shifts);
            lemma1.feed(frobenius_norm(classic.phat - block.gramian()) /
                        std::max(frobenius_norm(classic.phat), 1e-300));
            resid.feed(residual_identity_gap(p, block.z, block.bperp));

            // complex vs real pair steps
            if (true) {
                std::uniform_real_distribution<double> re(0.3, 2.5);
                std::uniform_real_distribution<double> im(0.2, 2.0);
                std::uniform_real_distribution<double> entry(-1.0, 1.0);
                CMat b(m, 1);
                for (Index r = 0; r < m; ++r) b(r, 0) = Complex(entry(gen), entry(gen));
                if (vector_norm(b) == 0.0) b(0, 0) = 1.0;
                ShiftPair sp(Complex(re(gen), im(gen)), std::move(b));
                ComplexStepResult cres = tlradi_step_complex_c(p, to_complex(p.b), sp);
                AdiState rstate;
                rstate.z = RMat(p.n(), 0);
                rstate.bperp = p.b;
                tlradi_step_complex_r(p, rstate, sp);
                RMat phat_c = real_part(multiply(cres.z_block, cres.z_block, Op::N, Op::H));
                thm34.feed(frobenius_norm(phat_c - rstate.gramian()) /
                           std::max(frobenius_norm(phat_c), 1e-300));
                resid.feed(residual_identity_gap(p, rstate.z, rstate.bperp));
            }

            // iteration vs restarted projection route
            std::vector<ShiftPair> seq = draw_tangential_sequence(gen, m, 6);
            StaticShiftSource source(seq);
            TlradiOptions topt;
            topt.tol = 1e-15;
            topt.max_cols = 2 * p.n() + 16;
            AdiState tang = tlradi_run(p, source, topt);
            if (opt.inject_fault && !tang.z.empty()) tang.z(0, 0) += 0.1 * (1.0 + std::abs(tang.z(0, 0)));
            RestartedOracle ora = krylov_restarted_solution(p, seq);
            oracle_p.feed(frobenius_norm(tang.gramian() - ora.phat) / std::max(frobenius_norm(ora.phat), 1e-300));
            oracle_r.feed(frobenius_norm(multiply(tang.bperp, tang.bperp, Op::N, Op::T) -
                                         multiply(ora.bperp, ora.bperp, Op::N, Op::T)) /
                          bbt_norm);
            resid.feed(residual_identity_gap(p, tang.z, tang.bperp));

            // reduced-equation closed form: substitution residual
            if (!seq.empty()) {
                KrylovData kd = build_tangential_basis(p, expand_conjugate_pairs(seq));
                CMat x = oracle_reduced_solution(kd);
                CMat g = multiply(kd.l, kd.l, Op::H, Op::N);
                const Index k = static_cast<Index>(kd.shifts.size());
                CMat res(k, k);
                for (Index j = 0; j < k; ++j)
                    for (Index i = 0; i < k; ++i)
                        res(i, j) = std::conj(kd.shifts[i]) * x(i, j) + x(i, j) * kd.shifts[j] - g(i, j);
                cauchy_sub.feed(frobenius_norm(res) / std::max(frobenius_norm(g), 1e-300));
            }

            // dense solve: symmetric and PSD
            if (n <= 60) {
                RMat sol = dense_lyap_solve(p.a, p.e, p.b);
                dense_sym.feed(frobenius_norm(sol - transpose(sol)) / std::max(frobenius_norm(sol), 1e-300));
                std::vector<double> ev = eig_symmetric_values(sol);
                const double floor_ok = -1e-10 * std::max(std::abs(ev.back()), 1e-300);
                dense_sym.feed(ev.front() < floor_ok ? 1.0 : 0.0);
            }
        }
    }

    std::vector<CheckResult> out;
    out.push_back({"block classic vs residual-based (Gramian)", lemma1.value <= 1e-10, lemma1.value, 1e-10});
    out.push_back({"complex vs real pair step (Gramian)", thm34.value <= 1e-11, thm34.value, 1e-11});
    out.push_back({"iteration vs projection route (Gramian)", oracle_p.value <= 1e-9, oracle_p.value, 1e-9});
    out.push_back({"iteration vs projection route (residual)", oracle_r.value <= 1e-9, oracle_r.value, 1e-9});
    out.push_back({"per-step residual identity", resid.value <= 1e-8, resid.value, 1e-8});
    out.push_back({"reduced-equation substitution residual", cauchy_sub.value <= 1e-12, cauchy_sub.value, 1e-12});
    out.push_back({"dense solve symmetry and definiteness", dense_sym.value <= 1e-13, dense_sym.value, 1e-13});
    return out;
}

}  // namespace lradi

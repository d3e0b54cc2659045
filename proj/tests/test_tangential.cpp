#include <cmath>

#include "doctest.h"
#include "lradi/krylov_oracle.hpp"
#include "lradi/problem.hpp"
#include "lradi/tangential.hpp"
#include "test_support.hpp"

using namespace lradi;
using namespace lradi::testsupport;

namespace {

LyapunovProblem scalar_problem() {
    LyapunovProblem p;
    p.a = RMat(1, 1);
    p.a(0, 0) = -1.0;
    p.e = RMat::identity(1);
    p.b = RMat(1, 1);
    p.b(0, 0) = 1.0;
    return p;
}

LyapunovProblem diag_problem() {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 0) = -1.0;
    p.a(1, 1) = -2.0;
    p.e = RMat::identity(2);
    p.b = RMat::identity(2);
    return p;
}

CMat unit_direction(Index m, Index hot) {
    CMat b(m, 1);
    b(hot, 0) = 1.0;
    return b;
}

AdiState fresh_state(const LyapunovProblem& p) {
    AdiState st;
    st.z = RMat(p.n(), 0);
    st.bperp = p.b;
    return st;
}

ShiftPair random_complex_pair(Index m, std::mt19937& gen) {
    std::uniform_real_distribution<double> re(0.3, 2.5);
    std::uniform_real_distribution<double> im(0.2, 2.0);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    CMat b(m, 1);
    for (Index i = 0; i < m; ++i) b(i, 0) = Complex(entry(gen), entry(gen));
    return ShiftPair(Complex(re(gen), im(gen)), std::move(b));
}

}  // namespace

TEST_SUITE("tangential") {

TEST_CASE("complex_pair_coeffs: frozen triples") {
    CMat b1(1, 1);
    b1(0, 0) = 1.0;
    ComplexPairCoefficients c1 = complex_pair_coeffs(ShiftPair(Complex(1.0, 2.0), b1));
    CHECK(std::abs(c1.alpha - Complex(0.2, 0.4)) < 1e-15);
    CHECK(c1.beta == doctest::Approx(1.0 / std::sqrt(0.8)).epsilon(1e-15));
    CHECK(c1.gamma == doctest::Approx(std::sqrt(1.2)).epsilon(1e-15));

    CMat b2(2, 1);
    b2(0, 0) = 1.0 / std::sqrt(2.0);
    b2(1, 0) = Complex(0.0, 1.0 / std::sqrt(2.0));
    ComplexPairCoefficients c2 = complex_pair_coeffs(ShiftPair(Complex(0.7, 1.3), b2));
    CHECK(std::abs(c2.alpha) < 1e-15);
    CHECK(c2.beta == doctest::Approx(1.0));
    CHECK(c2.gamma == doctest::Approx(1.0));

    ComplexPairCoefficients c3 = complex_pair_coeffs(ShiftPair(Complex(1.0, 1.0), b1));
    CHECK(std::abs(c3.alpha - Complex(0.5, 0.5)) < 1e-15);
    CHECK(c3.beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("complex_pair_coeffs: degenerate near-real shift is rejected") {
    CMat b(1, 1);
    b(0, 0) = 1.0;
    CHECK_THROWS_WITH_AS(complex_pair_coeffs(ShiftPair(Complex(1.0, 1e-10), b)), "use real-shift path",
                         std::runtime_error);
}

TEST_CASE("tlradi_step_real: scalar exactness") {
    LyapunovProblem p = scalar_problem();
    AdiState st = fresh_state(p);
    tlradi_step_real(p, st, ShiftPair(Complex(1.0, 0.0), unit_direction(1, 0)));
    CHECK(st.z(0, 0) == doctest::Approx(-std::sqrt(2.0) / 2.0));
    CHECK(std::abs(st.bperp(0, 0)) < 1e-15);
    CHECK(st.gramian()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tlradi_step_real: diagonal directions annihilate one input each") {
    LyapunovProblem p = diag_problem();
    AdiState st = fresh_state(p);
    tlradi_step_real(p, st, ShiftPair(Complex(1.0, 0.0), unit_direction(2, 0)));
    CHECK(st.z(0, 0) == doctest::Approx(-std::sqrt(2.0) / 2.0));
    CHECK(st.z(1, 0) == 0.0);
    CHECK(st.bperp(0, 0) == doctest::Approx(0.0));
    CHECK(st.bperp(1, 1) == doctest::Approx(1.0));

    AdiState st2 = fresh_state(p);
    tlradi_step_real(p, st2, ShiftPair(Complex(2.0, 0.0), unit_direction(2, 1)));
    CHECK(st2.z(0, 0) == 0.0);
    CHECK(st2.z(1, 0) == doctest::Approx(-0.5));
    CHECK(st2.bperp(0, 0) == doctest::Approx(1.0));
    CHECK(st2.bperp(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("tlradi_step_complex_c: frozen scalar pair values") {
    LyapunovProblem p = scalar_problem();
    ComplexStepResult r = tlradi_step_complex_c(p, to_complex(p.b), ShiftPair(Complex(1.0, 1.0), unit_direction(1, 0)));
    // y = -sqrt(2)(2-i)/5, second column beta*(conj(y) - alpha y) = -(1+i)/5
    CHECK(std::abs(r.z_block(0, 0) - Complex(-2.0 * std::sqrt(2.0) / 5.0, std::sqrt(2.0) / 5.0)) < 1e-14);
    CHECK(std::abs(r.z_block(0, 1) - Complex(-0.2, -0.2)) < 1e-14);
    CHECK(std::abs(r.bperp(0, 0) - Complex(0.2, 0.0)) < 1e-14);
    CMat phat = multiply(r.z_block, r.z_block, Op::N, Op::H);
    CHECK(std::abs(phat(0, 0) - Complex(0.48, 0.0)) < 1e-14);
}

TEST_CASE("tlradi_step_complex_c: Gramian is real for a structured problem") {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 1) = 1.0;
    p.a(1, 0) = -2.0;
    p.a(1, 1) = -2.0;
    p.e = RMat::identity(2);
    p.b = RMat(2, 1);
    p.b(0, 0) = 1.0;
    ComplexStepResult r = tlradi_step_complex_c(p, to_complex(p.b), ShiftPair(Complex(1.0, 1.0), unit_direction(1, 0)));
    CMat phat = multiply(r.z_block, r.z_block, Op::N, Op::H);
    CHECK(max_abs_imag(phat) < 1e-12 * frobenius_norm(phat));
}

TEST_CASE("complex steps: theorem 3 and theorem 4 paths agree") {
    std::mt19937 gen(101);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 8, m = 3;
        LyapunovProblem p = gen_random_stable(n, m, 200 + trial);
        ShiftPair sp = random_complex_pair(m, gen);

        ComplexStepResult c = tlradi_step_complex_c(p, to_complex(p.b), sp);
        AdiState st = fresh_state(p);
        tlradi_step_complex_r(p, st, sp);

        RMat phat_c = real_checked(multiply(c.z_block, c.z_block, Op::N, Op::H), 1e-11);
        CHECK(rel_diff(phat_c, st.gramian()) < 1e-11);
        RMat bperp_c = real_checked(c.bperp, 1e-11);
        CHECK(rel_diff(bperp_c, st.bperp) < 1e-11);
        CHECK(residual_identity_gap(p, st.z, st.bperp) < 1e-10);
    }
}

TEST_CASE("complex step: isotropic direction collapses to sqrt(2)[Re y, Im y]") {
    const Index m = 2;
    LyapunovProblem p = gen_random_stable(6, m, 17);
    CMat b(m, 1);
    b(0, 0) = 1.0 / std::sqrt(2.0);
    b(1, 0) = Complex(0.0, 1.0 / std::sqrt(2.0));
    ShiftPair sp(Complex(0.9, 1.4), b);
    AdiState st = fresh_state(p);
    tlradi_step_complex_r(p, st, sp);
    ShiftedSolver solver(p.a, p.e, sp.s);
    CMat y = Complex(std::sqrt(2.0 * sp.s.real()), 0.0) * solver.solve(multiply(to_complex(p.b), sp.b));
    for (Index i = 0; i < p.n(); ++i) {
        CHECK(st.z(i, 0) == doctest::Approx(std::sqrt(2.0) * y(i, 0).real()).epsilon(1e-12));
        CHECK(st.z(i, 1) == doctest::Approx(std::sqrt(2.0) * y(i, 0).imag()).epsilon(1e-12));
    }
}

TEST_CASE("tlradi_run: static shifts reach the exact diagonal solution") {
    LyapunovProblem p = diag_problem();
    std::vector<ShiftPair> pairs{ShiftPair(Complex(1.0, 0.0), unit_direction(2, 0)),
                                 ShiftPair(Complex(2.0, 0.0), unit_direction(2, 1))};
    StaticShiftSource source(pairs);
    TlradiOptions opt;
    opt.tol = 1e-14;
    opt.max_cols = 10;
    AdiState st = tlradi_run(p, source, opt);
    CHECK(st.converged);
    CHECK(st.z.cols() == 2);
    RMat phat = st.gramian();
    CHECK(phat(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(phat(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(phat(0, 1)) < 1e-15);
    CHECK(max_abs(st.bperp) < 1e-15);
}

TEST_CASE("tlradi_run: huge tolerance means zero iterations") {
    LyapunovProblem p = diag_problem();
    StaticShiftSource source({ShiftPair(Complex(1.0, 0.0), unit_direction(2, 0))});
    TlradiOptions opt;
    opt.tol = 10.0;
    opt.max_cols = 10;
    AdiState st = tlradi_run(p, source, opt);
    CHECK(st.converged);
    CHECK(st.z.cols() == 0);
}

TEST_CASE("tlradi_run: column accounting for mixed shift kinds") {
    LyapunovProblem p = gen_random_stable(10, 2, 33);
    std::vector<ShiftPair> pairs{ShiftPair(Complex(1.0, 0.0), unit_direction(2, 0)),
                                 random_complex_pair(2, *([] { static std::mt19937 g(5); return &g; }())),
                                 ShiftPair(Complex(2.5, 0.0), unit_direction(2, 1))};
    StaticShiftSource source(pairs);
    TlradiOptions opt;
    opt.tol = 1e-14;
    opt.max_cols = 100;
    AdiState st = tlradi_run(p, source, opt);
    CHECK(st.z.cols() == 1 + 2 + 1);
    CHECK(st.residual_history.size() == 4);  // baseline + 3 steps
    CHECK(residual_identity_gap(p, st.z, st.bperp) < 1e-8);
}

TEST_CASE("block specialization: equal real shifts with orthonormal directions") {
    for (unsigned seed : {3u, 8u}) {
        LyapunovProblem p = gen_random_stable(14, 3, seed);
        const double s = 1.7;
        AdiState block = fresh_state(p);
        block_step_real(p, block, s);

        AdiState tang = fresh_state(p);
        for (Index j = 0; j < 3; ++j) tlradi_step_real(p, tang, ShiftPair(Complex(s, 0.0), unit_direction(3, j)));

        CHECK(rel_diff(block.gramian(), tang.gramian()) < 1e-11);
        CHECK(rel_diff(block.bperp, tang.bperp) < 1e-11);
    }
}

TEST_CASE("oracle equivalence: iteration matches the projection route") {
    std::mt19937 gen(301);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<Index> n_dist(4, 30);
        std::uniform_int_distribution<Index> m_dist(1, 4);
        std::uniform_int_distribution<int> len_dist(1, 4);
        std::uniform_real_distribution<double> re(0.3, 2.5);
        std::uniform_real_distribution<double> entry(-1.0, 1.0);
        std::bernoulli_distribution coin(0.5);
        const Index n = n_dist(gen);
        const Index m = std::min(n, m_dist(gen));
        LyapunovProblem p = gen_random_stable(n, m, 900 + trial);

        std::vector<ShiftPair> seq;
        const int len = len_dist(gen);
        for (int i = 0; i < len; ++i) {
            if (coin(gen)) {
                seq.push_back(random_complex_pair(m, gen));
            } else {
                CMat b(m, 1);
                for (Index r = 0; r < m; ++r) b(r, 0) = entry(gen);
                if (vector_norm(b) == 0.0) b(0, 0) = 1.0;
                seq.emplace_back(Complex(re(gen), 0.0), std::move(b));
            }
        }

        StaticShiftSource source(seq);
        TlradiOptions opt;
        opt.tol = 1e-15;
        opt.max_cols = 100;
        AdiState st = tlradi_run(p, source, opt);

        RestartedOracle oracle = krylov_restarted_solution(p, seq);
        CHECK(frobenius_norm(st.gramian() - oracle.phat) <= 1e-9 * std::max(frobenius_norm(oracle.phat), 1e-300));
        RMat bbt = multiply(p.b, p.b, Op::N, Op::T);
        CHECK(frobenius_norm(multiply(st.bperp, st.bperp, Op::N, Op::T) -
                             multiply(oracle.bperp, oracle.bperp, Op::N, Op::T)) <= 1e-9 * frobenius_norm(bbt));
    }
}

TEST_CASE("oracle equivalence: single-basis projection route coincides for m = 1") {
    std::mt19937 gen(311);
    std::uniform_real_distribution<double> re(0.3, 2.5);
    std::uniform_real_distribution<double> im(0.3, 1.8);
    for (int trial = 0; trial < 5; ++trial) {
        LyapunovProblem p = gen_random_stable(18, 1, 950 + trial);
        std::vector<ShiftPair> seq;
        seq.emplace_back(Complex(re(gen), 0.0), unit_direction(1, 0));
        seq.emplace_back(Complex(re(gen) + 1.0, im(gen)), unit_direction(1, 0));
        seq.emplace_back(Complex(re(gen) + 3.0, 0.0), unit_direction(1, 0));

        StaticShiftSource source(seq);
        TlradiOptions opt;
        opt.tol = 1e-15;
        opt.max_cols = 100;
        AdiState st = tlradi_run(p, source, opt);

        KrylovData kd = build_tangential_basis(p, expand_conjugate_pairs(seq));
        RMat phat_oracle = real_checked(krylov_approximant(kd), 1e-9);
        CHECK(frobenius_norm(st.gramian() - phat_oracle) <= 1e-9 * std::max(frobenius_norm(phat_oracle), 1e-300));
        RMat bperp_sq_oracle = real_checked(
            multiply(krylov_residual_factor(p, kd), krylov_residual_factor(p, kd), Op::N, Op::H), 1e-8);
        RMat bbt = multiply(p.b, p.b, Op::N, Op::T);
        CHECK(frobenius_norm(multiply(st.bperp, st.bperp, Op::N, Op::T) - bperp_sq_oracle) <=
              1e-9 * frobenius_norm(bbt));
    }
}

}  // TEST_SUITE

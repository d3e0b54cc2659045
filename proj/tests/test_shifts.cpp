#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "lradi/shifts.hpp"
#include "lradi/tangential.hpp"
#include "test_support.hpp"

using namespace lradi;
using namespace lradi::testsupport;

namespace {

CMat unit_direction(Index m, Index hot) {
    CMat b(m, 1);
    b(hot, 0) = 1.0;
    return b;
}

LyapunovProblem diag_problem(double a0, double a1) {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 0) = a0;
    p.a(1, 1) = a1;
    p.e = RMat::identity(2);
    p.b = RMat(2, 1);
    p.b(0, 0) = 1.0;
    p.b(1, 0) = 1.0;
    return p;
}

}  // namespace

TEST_SUITE("shifts") {

TEST_CASE("ShiftPair: normalization and validation") {
    CMat b(2, 1);
    b(0, 0) = 0.0;
    b(1, 0) = -2.0;
    ShiftPair sp(Complex(1.0, 0.0), b);
    CHECK(vector_norm(sp.b) == doctest::Approx(1.0));
    CHECK(sp.b(1, 0) == Complex(1.0, 0.0));  // phase convention: largest entry real positive
    CHECK(sp.is_real());
    CHECK_THROWS_AS(ShiftPair(Complex(-1.0, 0.0), unit_direction(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(ShiftPair(Complex(1.0, 0.0), CMat(2, 1)), std::invalid_argument);
}

TEST_CASE("initial_shift: diagonal example picks the smallest-magnitude eigenvalue") {
    LyapunovProblem p = diag_problem(-1.0, -5.0);
    InitialShift init = initial_shift(p);
    CHECK(!init.fallback_used);
    CHECK(init.pair.s.real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(init.pair.s.imag()) < 1e-9);
    CHECK(std::abs(init.pair.b(0, 0) - Complex(1.0, 0.0)) < 1e-9);
}

TEST_CASE("initial_shift: scalar generalized eigenvalue") {
    LyapunovProblem p;
    p.a = RMat(1, 1);
    p.a(0, 0) = -3.0;
    p.e = RMat(1, 1);
    p.e(0, 0) = 2.0;
    p.b = RMat(1, 1);
    p.b(0, 0) = 1.0;
    InitialShift init = initial_shift(p);
    CHECK(init.pair.s == Complex(1.5, 0.0));
    CHECK(init.pair.b(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("initial_shift: near-degenerate spectrum still converges") {
    LyapunovProblem p = diag_problem(-2.0, -2.0 - 1e-3);
    InitialShift init = initial_shift(p);
    CHECK(!init.fallback_used);
    CHECK(init.pair.s.real() == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("initial_shift: complex smallest pair handled by subspace escalation") {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 1) = 1.0;
    p.a(1, 0) = -2.0;
    p.a(1, 1) = -2.0;  // eigenvalues -1 +/- i
    p.e = RMat::identity(2);
    p.b = RMat(2, 1);
    p.b(0, 0) = 1.0;
    InitialShift init = initial_shift(p);
    CHECK(!init.fallback_used);
    CHECK(init.pair.s.real() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(init.pair.s.imag()) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("project_pair: scalar projection is exact") {
    LyapunovProblem p;
    p.a = RMat(1, 1);
    p.a(0, 0) = -3.0;
    p.e = RMat(1, 1);
    p.e(0, 0) = 2.0;
    p.b = RMat(1, 1);
    p.b(0, 0) = 1.0;
    RMat v(1, 1);
    v(0, 0) = 5.0;
    RitzData rd = project_pair(p, p.b, v);
    CHECK(rd.aj(0, 0) == doctest::Approx(-1.5));
    CHECK(rd.d[0] == Complex(-1.5, 0.0));
}

TEST_CASE("project_pair: invariant subspace reproduces exact eigenvalues") {
    LyapunovProblem p = diag_problem(-1.0, -2.0);
    RMat v = RMat::identity(2);
    RitzData rd = project_pair(p, p.b, v);
    CHECK(rd.d[0] == Complex(-2.0, 0.0));
    CHECK(rd.d[1] == Complex(-1.0, 0.0));
}

TEST_CASE("project_pair: reconstruction identity on a random basis") {
    LyapunovProblem p = gen_random_stable(20, 2, 77);
    std::mt19937 gen(5);
    RMat v = random_matrix(20, 2, gen);
    RitzData rd = project_pair(p, p.b, v);
    // (V^T E V) Aj = V^T A V
    RMat vev = multiply(multiply(v, p.e, Op::T, Op::N), v);
    RMat vav = multiply(multiply(v, p.a, Op::T, Op::N), v);
    CHECK(rel_diff(multiply(vev, rd.aj), vav) < 1e-12);
}

TEST_CASE("project_pair: rank-deficient basis rejected") {
    LyapunovProblem p = diag_problem(-1.0, -2.0);
    RMat v(2, 2);
    v(0, 0) = 1.0;
    v(0, 1) = 1.0;  // two identical columns
    CHECK_THROWS_WITH_AS(project_pair(p, p.b, v), "rank-deficient projection basis", std::runtime_error);
}

TEST_CASE("tangential_krylov_basis: scalar formula and Sylvester residual") {
    LyapunovProblem p;
    p.a = RMat(1, 1);
    p.a(0, 0) = -4.0;
    p.e = RMat::identity(1);
    p.b = RMat(1, 1);
    p.b(0, 0) = 2.0;
    CMat btilde(1, 1);
    btilde(0, 0) = Complex(3.0, 0.0);
    CMat v = tangential_krylov_basis_raw(p, p.b, {Complex(-1.5, 0.0)}, btilde);
    // (a + d) v = bperp * conj(btilde) -> v = 2*3 / (-5.5)
    CHECK(std::abs(v(0, 0) - Complex(6.0 / -5.5, 0.0)) < 1e-14);
}

TEST_CASE("tangential_krylov_basis: conjugate pair costs one solve, satisfies the relation") {
    LyapunovProblem p = gen_random_stable(12, 3, 55);
    std::vector<Complex> d{Complex(-0.8, 1.1), Complex(-0.8, -1.1)};
    CMat btilde(2, 3);
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Index j = 0; j < 3; ++j) {
        btilde(0, j) = Complex(dist(gen), dist(gen));
        btilde(1, j) = std::conj(btilde(0, j));
    }
    const long before = shifted_factorization_count().load();
    CMat v = tangential_krylov_basis_raw(p, p.b, d, btilde);
    CHECK(shifted_factorization_count().load() - before == 1);
    for (Index i = 0; i < p.n(); ++i) CHECK(v(i, 1) == std::conj(v(i, 0)));
    // A V + E V D = Bperp Btilde^H
    CMat av = multiply(to_complex(p.a), v);
    CMat evd = multiply(to_complex(p.e), v);
    for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < p.n(); ++i) evd(i, j) *= d[j];
    CMat rhs = multiply(to_complex(p.b), btilde, Op::N, Op::H);
    CHECK(frobenius_norm(av + evd - rhs) < 1e-10 * frobenius_norm(rhs));
}

TEST_CASE("irka_update: scalar problem emits the exact mirror") {
    LyapunovProblem p;
    p.a = RMat(1, 1);
    p.a(0, 0) = -3.0;
    p.e = RMat::identity(1);
    p.b = RMat(1, 1);
    p.b(0, 0) = 1.0;
    RMat zi(1, 1);
    zi(0, 0) = 1.0;
    IrkaResult r = irka_update(p, p.b, zi, 1e-6, 3);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].s == Complex(3.0, 0.0));
    CHECK(r.converged);  // second pass sees no change
}

TEST_CASE("irka_update: n_max=1 consumes exactly one shifted factorization") {
    LyapunovProblem p = gen_random_stable(15, 2, 88);
    RMat zi(15, 1);
    for (Index i = 0; i < 15; ++i) zi(i, 0) = 1.0 + 0.1 * static_cast<double>(i);
    const long before = shifted_factorization_count().load();
    IrkaResult r = irka_update(p, p.b, zi, 1e-6, 1);
    CHECK(shifted_factorization_count().load() - before == 1);
    CHECK(r.passes == 1);
    REQUIRE(r.pairs.size() >= 1);
    CHECK(r.pairs[0].s.real() > 0.0);
    CHECK(r.presolved_y.has_value());
}

TEST_CASE("irka_update: presolved iterate matches a fresh solve") {
    LyapunovProblem p = gen_random_stable(12, 3, 91);
    RMat zi(12, 1);
    for (Index i = 0; i < 12; ++i) zi(i, 0) = std::sin(static_cast<double>(i) + 1.0);
    IrkaResult r = irka_update(p, p.b, zi, 1e-8, 1);
    REQUIRE(r.presolved_y.has_value());
    const ShiftPair& sp = r.pairs[0];
    CMat fresh = shifted_solve(p.a, p.e, sp.s, multiply(to_complex(p.b), sp.b));
    CHECK(rel_diff(*r.presolved_y, fresh) < 1e-11);
}

TEST_CASE("irka_update: invariant two-dimensional basis emits both exact real shifts") {
    LyapunovProblem p = diag_problem(-1.0, -2.0);
    p.b = RMat(2, 2);
    p.b(0, 0) = 1.0;
    p.b(1, 1) = 1.0;
    RMat zi = RMat::identity(2);
    IrkaResult r = irka_update(p, p.b, zi, 1e-10, 1);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].s == Complex(2.0, 0.0));
    CHECK(r.pairs[1].s == Complex(1.0, 0.0));
    // directions follow the btilde rows: e2 for -2, e1 for -1
    CHECK(std::abs(r.pairs[0].b(1, 0) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(r.pairs[1].b(0, 0) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("irka_update: right-half-plane Ritz value is used directly") {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 0) = -1.0;
    p.a(0, 1) = 20.0;
    p.a(1, 1) = -1.0;
    p.e = RMat::identity(2);
    p.b = RMat(2, 1);
    p.b(0, 0) = 1.0;
    p.b(1, 0) = 1.0;
    RMat zi(2, 1);
    zi(0, 0) = 1.0 / std::sqrt(2.0);
    zi(1, 0) = 1.0 / std::sqrt(2.0);  // Rayleigh quotient 9 > 0
    IrkaResult r = irka_update(p, p.b, zi, 1e-6, 1);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].s == Complex(9.0, 0.0));
    CHECK(!r.presolved_y.has_value());  // solve was for the mirror, not reusable
}

TEST_CASE("irka_update: purely imaginary Ritz values are an error") {
    LyapunovProblem p;
    p.a = RMat(2, 2);
    p.a(0, 1) = 1.0;
    p.a(1, 0) = -1.0;  // spectrum {+i, -i}
    p.e = RMat::identity(2);
    p.b = RMat(2, 1);
    p.b(0, 0) = 1.0;
    RMat zi = RMat::identity(2);
    CHECK_THROWS_WITH_AS(irka_update(p, p.b, zi, 1e-6, 1), "no usable shift", std::runtime_error);
}

TEST_CASE("irka_update: fixed point reproduces the mirrored shift") {
    LyapunovProblem p = gen_heat_1d(12, 1, 3);
    RMat zi(12, 1);
    for (Index i = 0; i < 12; ++i) zi(i, 0) = std::cos(0.3 * static_cast<double>(i));
    IrkaResult r = irka_update(p, p.b, zi, 1e-12, 200);
    CHECK(r.converged);
    const ShiftPair& sp = r.pairs[0];
    CMat v = shifted_solve(p.a, p.e, sp.s, multiply(to_complex(p.b), sp.b));
    RitzData rd = project_pair(p, p.b, v);
    bool found = false;
    for (const Complex& lam : rd.d)
        if (std::abs(lam + sp.s) <= 1e-6 * std::abs(sp.s)) found = true;
    CHECK(found);
}

TEST_CASE("static source: emits in order then exhausts; empty list errors") {
    LyapunovProblem p = diag_problem(-1.0, -2.0);
    std::vector<ShiftPair> pairs;
    for (double s : {1.0, 2.0, 3.0}) pairs.emplace_back(Complex(s, 0.0), unit_direction(1, 0));
    StaticShiftSource source(pairs);
    for (int i = 0; i < 3; ++i) CHECK(source.next(p, p.b, nullptr).has_value());
    CHECK(!source.next(p, p.b, nullptr).has_value());
    StaticShiftSource empty({});
    CHECK_THROWS_AS(empty.next(p, p.b, nullptr), std::runtime_error);
}

TEST_CASE("shift file round trip") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "lradi_shifts_test.txt").string();
    std::vector<ShiftPair> pairs;
    CMat b(2, 1);
    b(0, 0) = Complex(0.6, 0.0);
    b(1, 0) = Complex(0.0, 0.8);
    pairs.emplace_back(Complex(1.5, 2.5), b);
    pairs.emplace_back(Complex(3.0, 0.0), unit_direction(2, 1));
    write_shift_file(path, pairs);
    std::vector<ShiftPair> back = load_shift_file(path, 2);
    REQUIRE(back.size() == 2);
    CHECK(back[0].s == pairs[0].s);
    CHECK(std::abs(back[0].b(1, 0) - pairs[0].b(1, 0)) < 1e-15);
    CHECK(back[1].s == pairs[1].s);
    fs::remove(path);
    CHECK_THROWS_AS(load_shift_file(path, 2), std::runtime_error);
}

TEST_CASE("smallest_generalized_eigs: conjugate closure of the returned set") {
    LyapunovProblem p;
    p.a = RMat(3, 3);
    p.a(0, 1) = 1.0;
    p.a(1, 0) = -2.0;
    p.a(1, 1) = -2.0;  // pair -1 +/- i, |.| = sqrt(2)
    p.a(2, 2) = -5.0;
    p.e = RMat::identity(3);
    p.b = RMat(3, 1);
    p.b(0, 0) = 1.0;
    SmallestEigs se = smallest_generalized_eigs(p, 1);
    // the smallest eigenvalue is one member of the pair
    CHECK(std::abs(std::abs(se.values[0]) - std::sqrt(2.0)) < 1e-7);
}

}  // TEST_SUITE

#include "lradi/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace lradi {

void LyapunovProblem::validate() const {
    const Index nn = a.rows();
    if (a.cols() != nn || e.rows() != nn || e.cols() != nn)
        throw std::invalid_argument("dimension mismatch: A and E must be square of equal order");
    if (b.rows() != nn) throw std::invalid_argument("dimension mismatch: B row count differs from A");
    if (b.cols() > nn) throw std::invalid_argument("dimension mismatch: more inputs than states (m > n)");
    if (!all_finite(a) || !all_finite(e) || !all_finite(b))
        throw std::invalid_argument("non-finite entries in problem data");
    RLu check(e);  // throws SingularMatrixError when E is rank deficient
}

bool LyapunovProblem::check_stable() const {
    RLu elu(e);
    RMat m = elu.solve(a);
    for (const Complex& v : eig_values(m))
        if (v.real() >= 0.0) return false;
    return true;
}

LyapunovProblem gen_heat_1d(Index n, Index m, unsigned seed) {
    if (n < 3) throw std::invalid_argument("gen_heat_1d: n must be at least 3");
    if (m < 1 || m > n) throw std::invalid_argument("gen_heat_1d: need 1 <= m <= n");
    LyapunovProblem p;
    p.a = RMat(n, n);
    const double h2 = static_cast<double>((n + 1) * (n + 1));
    for (Index i = 0; i < n; ++i) {
        p.a(i, i) = -2.0 * h2;
        if (i + 1 < n) {
            p.a(i, i + 1) = h2;
            p.a(i + 1, i) = h2;
        }
    }
    p.e = RMat::identity(n);
    p.b = RMat(n, m);
    std::mt19937 gen(seed);
    std::vector<Index> rows(n);
    for (Index i = 0; i < n; ++i) rows[i] = i;
    for (Index j = 0; j < m; ++j) {
        std::uniform_int_distribution<Index> pick(j, n - 1);
        std::swap(rows[j], rows[pick(gen)]);
        p.b(rows[j], j) = 1.0;
    }
    return p;
}

namespace {

// spectral norm estimate by power iteration on M^T M, deterministic start
double norm2_estimate(const RMat& m) {
    const Index n = m.cols();
    if (m.rows() == 0 || n == 0) return 0.0;
    RMat v(n, 1);
    for (Index i = 0; i < n; ++i) v(i, 0) = 1.0 + 0.01 * static_cast<double>(i % 7);
    double vnorm = frobenius_norm(v);
    for (Index i = 0; i < n; ++i) v(i, 0) /= vnorm;
    for (int it = 0; it < 60; ++it) {
        RMat u = multiply(m, multiply(m, v), Op::T, Op::N);
        const double norm = frobenius_norm(u);
        if (norm == 0.0) return 0.0;
        v = (1.0 / norm) * u;
    }
    return frobenius_norm(multiply(m, v));
}

}  // namespace

LyapunovProblem gen_random_stable(Index n, Index m, unsigned seed) {
    if (n < 1) throw std::invalid_argument("gen_random_stable: n must be positive");
    if (m < 1 || m > n) throw std::invalid_argument("gen_random_stable: need 1 <= m <= n");
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto draw = [&](Index r, Index c) {
        RMat x(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) x(i, j) = dist(gen);
        return x;
    };

    LyapunovProblem p;
    RMat q = draw(n, n);
    const double qnorm = norm2_estimate(q);
    p.a = q;
    for (Index i = 0; i < n; ++i) p.a(i, i) -= qnorm + 1.0;

    // E = I + sym/(2||sym||) + skew * delta/||skew||. The symmetric part keeps
    // Re(v* E v) >= 1/4 and the skew magnitude delta = 1/(4(1+||Q||)) bounds
    // |Im(v* E v)| so that Re of every generalized eigenvalue stays negative.
    p.e = RMat::identity(n);
    if (n > 1) {
        RMat r1 = draw(n, n);
        RMat sym = 0.5 * (r1 + transpose(r1));
        const double snorm = norm2_estimate(sym);
        if (snorm > 0.0) p.e = p.e + (0.5 / snorm) * sym;
        RMat r2 = draw(n, n);
        RMat skew = 0.5 * (r2 - transpose(r2));
        const double knorm = norm2_estimate(skew);
        const double delta = 0.25 / (1.0 + qnorm);
        if (knorm > 0.0) p.e = p.e + (delta / knorm) * skew;
    }
    p.b = draw(n, m);
    return p;
}

// ---- Matrix Market ---------------------------------------------------------

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

RMat read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse failure: empty file " + path);
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw std::runtime_error("parse failure: missing MatrixMarket banner in " + path);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field == "complex") throw std::runtime_error("complex entries are not supported: " + path);
    if (field != "real" && field != "integer")
        throw std::runtime_error("parse failure: unsupported field type '" + field + "' in " + path);
    if (symmetry != "general" && symmetry != "symmetric")
        throw std::runtime_error("parse failure: unsupported symmetry '" + symmetry + "' in " + path);
    const bool symmetric = symmetry == "symmetric";

    auto next_data_line = [&](std::istringstream& out) {
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] == '%') continue;
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
            if (blank) continue;
            out = std::istringstream(line);
            return true;
        }
        return false;
    };

    std::istringstream sizes;
    if (!next_data_line(sizes)) throw std::runtime_error("parse failure: missing size line in " + path);

    if (format == "array") {
        Index rows = 0, cols = 0;
        if (!(sizes >> rows >> cols) || rows < 0 || cols < 0)
            throw std::runtime_error("parse failure: bad size line in " + path);
        RMat m(rows, cols);
        for (Index j = 0; j < cols; ++j) {
            const Index i0 = symmetric ? j : 0;
            for (Index i = i0; i < rows; ++i) {
                std::istringstream v;
                if (!next_data_line(v)) throw std::runtime_error("parse failure: truncated array data in " + path);
                double x;
                if (!(v >> x)) throw std::runtime_error("parse failure: bad array entry in " + path);
                m(i, j) = x;
                if (symmetric) m(j, i) = x;
            }
        }
        if (!all_finite(m)) throw std::runtime_error("non-finite entries in " + path);
        return m;
    }
    if (format != "coordinate")
        throw std::runtime_error("parse failure: unsupported format '" + format + "' in " + path);

    Index rows = 0, cols = 0, nnz = 0;
    if (!(sizes >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
        throw std::runtime_error("parse failure: bad size line in " + path);
    RMat m(rows, cols);
    for (Index k = 0; k < nnz; ++k) {
        std::istringstream v;
        if (!next_data_line(v)) throw std::runtime_error("parse failure: truncated coordinate data in " + path);
        Index i, j;
        double x;
        if (!(v >> i >> j >> x)) throw std::runtime_error("parse failure: bad coordinate entry in " + path);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw std::runtime_error("parse failure: index out of range in " + path);
        m(i - 1, j - 1) = x;
        if (symmetric) m(j - 1, i - 1) = x;
    }
    if (!all_finite(m)) throw std::runtime_error("non-finite entries in " + path);
    return m;
}

void write_matrix_market(const std::string& path, const RMat& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    Index nnz = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) ++nnz;
    out << m.rows() << " " << m.cols() << " " << nnz << "\n";
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) out << (i + 1) << " " << (j + 1) << " " << m(i, j) << "\n";
    if (!out) throw std::runtime_error("write failure: " + path);
}

LyapunovProblem load_matrix_market(const std::string& path_a, const std::optional<std::string>& path_e,
                                   const std::string& path_b) {
    LyapunovProblem p;
    p.a = read_matrix_market(path_a);
    if (p.a.rows() != p.a.cols()) throw std::runtime_error("dimension mismatch: A is not square");
    p.e = path_e ? read_matrix_market(*path_e) : RMat::identity(p.a.rows());
    p.b = read_matrix_market(path_b);
    if (p.e.rows() != p.a.rows() || p.e.cols() != p.a.cols())
        throw std::runtime_error("dimension mismatch: E differs from A");
    if (p.b.rows() != p.a.rows()) throw std::runtime_error("dimension mismatch: B row count differs from A");
    p.validate();
    return p;
}

}  // namespace lradi

#include "lradi/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace lradi {

std::string method_name(Method m) {
    switch (m) {
        case Method::Tangential: return "tangential";
        case Method::BlockAdaptiveA: return "block-adaptive-a";
        case Method::BlockAdaptiveB: return "block-adaptive-b";
        case Method::BlockStatic: return "block-static";
    }
    return "?";
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("bad key=value item '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

Index to_index(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<Index>(v);
    } catch (...) {
        throw std::invalid_argument("bad integer for " + what + ": '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw std::invalid_argument("bad number for " + what + ": '" + s + "'");
    }
}

}  // namespace

ProblemSpec parse_problem_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    ProblemSpec spec;
    if (head == "heat1d" || head == "random") {
        spec.kind = head == "heat1d" ? ProblemSpec::Kind::Heat1d : ProblemSpec::Kind::RandomStable;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "n") spec.n = to_index(v, "n");
            else if (k == "m") spec.m = to_index(v, "m");
            else if (k == "seed") { spec.seed = static_cast<unsigned>(to_index(v, "seed")); spec.has_seed = true; }
            else throw std::invalid_argument("unknown problem parameter '" + k + "'");
        }
        if (spec.n < 1 || spec.m < 1)
            throw std::invalid_argument("problem spec needs n=... and m=...");
        return spec;
    }
    if (head == "mtx") {
        spec.kind = ProblemSpec::Kind::MatrixMarket;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "A") spec.path_a = v;
            else if (k == "E") spec.path_e = v;
            else if (k == "B") spec.path_b = v;
            else throw std::invalid_argument("unknown problem parameter '" + k + "'");
        }
        if (spec.path_a.empty() || spec.path_b.empty())
            throw std::invalid_argument("mtx problem spec needs A=... and B=...");
        return spec;
    }
    throw std::invalid_argument("unknown problem kind '" + head + "' (expected heat1d|random|mtx)");
}

LyapunovProblem build_problem(const ProblemSpec& spec, unsigned global_seed) {
    const unsigned seed = spec.has_seed ? spec.seed : global_seed;
    switch (spec.kind) {
        case ProblemSpec::Kind::Heat1d: return gen_heat_1d(spec.n, spec.m, seed);
        case ProblemSpec::Kind::RandomStable: return gen_random_stable(spec.n, spec.m, seed);
        case ProblemSpec::Kind::MatrixMarket:
            return load_matrix_market(spec.path_a,
                                      spec.path_e.empty() ? std::nullopt : std::optional<std::string>(spec.path_e),
                                      spec.path_b);
    }
    throw std::logic_error("unreachable");
}

ShiftSpec parse_shift_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    ShiftSpec spec;
    if (head == "adaptive") {
        spec.kind = ShiftSpec::Kind::Adaptive;
        if (!rest.empty())
            for (const auto& [k, v] : parse_kv(rest)) {
                if (k == "nmax") spec.n_max = static_cast<int>(to_index(v, "nmax"));
                else if (k == "tol") spec.irka_tol = to_double(v, "tol");
                else throw std::invalid_argument("unknown shift parameter '" + k + "'");
            }
        if (spec.n_max < 1) throw std::invalid_argument("adaptive shifts need nmax >= 1");
        if (!(spec.irka_tol > 0.0)) throw std::invalid_argument("adaptive shifts need tol > 0");
        return spec;
    }
    if (head == "file") {
        spec.kind = ShiftSpec::Kind::File;
        spec.path = rest;
        if (spec.path.empty()) throw std::invalid_argument("file shift spec needs a path");
        return spec;
    }
    throw std::invalid_argument("unknown shift kind '" + head + "' (expected adaptive|file)");
}

void RunConfig::check() const {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_cols < 1) throw std::invalid_argument("max-cols must be at least 1");
    const bool is_block_adaptive = method == Method::BlockAdaptiveA || method == Method::BlockAdaptiveB;
    if (is_block_adaptive && shifts.kind == ShiftSpec::Kind::File)
        throw std::invalid_argument("static shift files cannot be combined with an adaptive block method");
    if (method == Method::BlockStatic && shifts.kind != ShiftSpec::Kind::File)
        throw std::invalid_argument("block-static requires --shifts file:PATH");
}

namespace {

// block iteration over a fixed shift list with the usual stopping rule
RunOutcome run_block_static(const LyapunovProblem& p, const std::vector<Complex>& shifts, double tol,
                            Index max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    RunOutcome out;
    out.bnorm = residual_norm(p.b);
    AdiState& st = out.state;
    st.z = RMat(p.n(), 0);
    st.bperp = p.b;
    st.residual_history.push_back({0, 0, out.bnorm, elapsed(), Complex(0.0, 0.0)});
    if (out.bnorm == 0.0) {
        out.converged = st.converged = true;
        return out;
    }
    Index iters = 0;
    for (const PlannedStep& step : plan_shift_list(shifts)) {
        if (residual_norm(st.bperp) < tol * out.bnorm) break;
        if (iters >= max_iters) break;
        if (step.pair)
            block_step_pair(p, st, step.s);
        else
            block_step_real(p, st, step.s.real());
        ++iters;
        st.residual_history.push_back(
            {iters, st.z.cols(), residual_norm(st.bperp), elapsed(), st.shift_history.back()});
    }
    out.converged = st.converged = residual_norm(st.bperp) < tol * out.bnorm;
    return out;
}

}  // namespace

RunOutcome run_method(const LyapunovProblem& p, const RunConfig& cfg) {
    cfg.check();
    RunOutcome out;
    out.bnorm = residual_norm(p.b);
    switch (cfg.method) {
        case Method::Tangential: {
            TlradiOptions opt;
            opt.tol = cfg.tol;
            opt.max_cols = cfg.max_cols;
            if (cfg.shifts.kind == ShiftSpec::Kind::Adaptive) {
                AdaptiveShiftSource source(cfg.shifts.n_max, cfg.shifts.irka_tol);
                out.state = tlradi_run(p, source, opt);
            } else {
                StaticShiftSource source(load_shift_file(cfg.shifts.path, p.m()));
                out.state = tlradi_run(p, source, opt);
            }
            break;
        }
        case Method::BlockAdaptiveA:
        case Method::BlockAdaptiveB: {
            BladiOptions opt;
            opt.tol = cfg.tol;
            opt.max_iters = std::max<Index>(1, cfg.max_cols / p.m());
            opt.init = cfg.method == Method::BlockAdaptiveA ? BladiInit::RitzOfB : BladiInit::SmallestEigs;
            out.state = bladi_run(p, opt);
            break;
        }
        case Method::BlockStatic: {
            std::vector<ShiftPair> pairs = load_shift_file(cfg.shifts.path, p.m());
            std::vector<Complex> shifts;
            shifts.reserve(pairs.size());
            for (const ShiftPair& sp : pairs) shifts.push_back(sp.is_real() ? Complex(sp.s.real(), 0.0) : sp.s);
            return run_block_static(p, shifts, cfg.tol, std::max<Index>(1, cfg.max_cols / p.m()));
        }
    }
    out.converged = out.state.converged;
    return out;
}

namespace {

void write_history_csv(const std::string& path, const AdiState& st, double bnorm) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "iter,cols,residual_norm,rel_residual,elapsed_seconds,shift_re,shift_im\n";
    for (const StepRecord& r : st.residual_history) {
        const double rel = bnorm > 0.0 ? r.residual_norm / bnorm : 0.0;
        out << r.iter << "," << r.cols << "," << r.residual_norm << "," << rel << "," << r.seconds << ","
            << r.shift.real() << "," << r.shift.imag() << "\n";
    }
}

void write_summary_csv(const std::string& path, const RunOutcome& run) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    const StepRecord& last = run.state.residual_history.back();
    const double rel = run.bnorm > 0.0 ? last.residual_norm / run.bnorm : 0.0;
    out << "converged,final_cols,final_rel_residual,total_seconds\n";
    out << (run.converged ? 1 : 0) << "," << last.cols << "," << rel << "," << last.seconds << "\n";
}

}  // namespace

int cmd_solve(const RunConfig& cfg) {
    cfg.check();
    if (cfg.out_dir.empty()) throw std::invalid_argument("solve needs --out DIR");
    std::filesystem::create_directories(cfg.out_dir);
    LyapunovProblem p = build_problem(cfg.problem, cfg.seed);
    p.validate();
    RunOutcome run = run_method(p, cfg);
    write_history_csv((std::filesystem::path(cfg.out_dir) / "history.csv").string(), run.state, run.bnorm);
    write_summary_csv((std::filesystem::path(cfg.out_dir) / "summary.csv").string(), run);
    return run.converged ? 0 : 2;
}

int cmd_compare(const RunConfig& cfg_a, const RunConfig& cfg_b) {
    cfg_a.check();
    cfg_b.check();
    if (cfg_a.out_dir.empty()) throw std::invalid_argument("compare needs --out DIR");
    std::filesystem::create_directories(cfg_a.out_dir);
    LyapunovProblem p = build_problem(cfg_a.problem, cfg_a.seed);
    p.validate();

    RunOutcome run_a = run_method(p, cfg_a);
    RunOutcome run_b = run_method(p, cfg_b);

    std::string name_a = method_name(cfg_a.method);
    std::string name_b = method_name(cfg_b.method);
    if (name_a == name_b) {
        name_a += "_1";
        name_b += "_2";
    }
    const auto dir = std::filesystem::path(cfg_a.out_dir);
    write_history_csv((dir / ("history_" + name_a + ".csv")).string(), run_a.state, run_a.bnorm);
    write_history_csv((dir / ("history_" + name_b + ".csv")).string(), run_b.state, run_b.bnorm);

    const bool with_errors = p.n() <= 200;
    RMat dense;
    double dense_norm = 1.0;
    if (with_errors) {
        dense = dense_lyap_solve(p.a, p.e, p.b);
        dense_norm = std::max(frobenius_norm(dense), 1e-300);
    }
    auto rel_error_at = [&](const AdiState& st, Index cols) {
        RMat zc = st.z.cols_range(0, cols);
        RMat diff = multiply(zc, zc, Op::N, Op::T) - dense;
        return frobenius_norm(diff) / dense_norm;
    };

    std::map<Index, std::pair<const StepRecord*, const StepRecord*>> merged;
    for (const StepRecord& r : run_a.state.residual_history) merged[r.cols].first = &r;
    for (const StepRecord& r : run_b.state.residual_history) merged[r.cols].second = &r;

    std::ofstream out(dir / "compare.csv");
    if (!out) throw std::runtime_error("cannot write compare.csv");
    out.precision(17);
    out << "cols," << name_a << "_rel_residual," << name_b << "_rel_residual";
    if (with_errors) out << "," << name_a << "_rel_error," << name_b << "_rel_error";
    out << "\n";
    for (const auto& [cols, recs] : merged) {
        out << cols;
        auto emit_rel = [&](const StepRecord* r, double bnorm) {
            out << ",";
            if (r) out << (bnorm > 0.0 ? r->residual_norm / bnorm : 0.0);
        };
        emit_rel(recs.first, run_a.bnorm);
        emit_rel(recs.second, run_b.bnorm);
        if (with_errors) {
            out << ",";
            if (recs.first) out << rel_error_at(run_a.state, cols);
            out << ",";
            if (recs.second) out << rel_error_at(run_b.state, cols);
        }
        out << "\n";
    }
    return (run_a.converged && run_b.converged) ? 0 : 2;
}

int cmd_verify(const VerifyOptions& opt) {
    std::vector<CheckResult> results = run_invariant_suite(opt);
    bool all = true;
    for (const CheckResult& r : results) {
        std::printf("[%s] %-45s measured %.3e (threshold %.1e)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.measured, r.threshold);
        all = all && r.passed;
    }
    return all ? 0 : 3;
}

int cmd_gen(const ProblemSpec& spec, unsigned global_seed, const std::string& out_dir) {
    if (out_dir.empty()) throw std::invalid_argument("gen needs --out DIR");
    std::filesystem::create_directories(out_dir);
    LyapunovProblem p = build_problem(spec, global_seed);
    p.validate();
    const auto dir = std::filesystem::path(out_dir);
    write_matrix_market((dir / "A.mtx").string(), p.a);
    write_matrix_market((dir / "B.mtx").string(), p.b);
    if (frobenius_norm(p.e - RMat::identity(p.n())) > 0.0)
        write_matrix_market((dir / "E.mtx").string(), p.e);
    return 0;
}

}  // namespace lradi

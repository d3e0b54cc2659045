#pragma once

#include <string>

#include "lradi/verify.hpp"

namespace lradi {

enum class Method { Tangential, BlockAdaptiveA, BlockAdaptiveB, BlockStatic };

std::string method_name(Method m);

/// Parsed --problem spec: "heat1d:n=..,m=.." | "random:n=..,m=..,seed=.." |
/// "mtx:A=..,E=..,B=..".
struct ProblemSpec {
    enum class Kind { Heat1d, RandomStable, MatrixMarket } kind = Kind::Heat1d;
    Index n = 0;
    Index m = 0;
    bool has_seed = false;
    unsigned seed = 1;
    std::string path_a, path_e, path_b;
};
ProblemSpec parse_problem_spec(const std::string& text);
LyapunovProblem build_problem(const ProblemSpec& spec, unsigned global_seed);

/// Parsed --shifts spec: "adaptive:nmax=K,tol=.." | "file:PATH".
struct ShiftSpec {
    enum class Kind { Adaptive, File } kind = Kind::Adaptive;
    int n_max = 1;
    double irka_tol = 1e-4;
    std::string path;
};
ShiftSpec parse_shift_spec(const std::string& text);

struct RunConfig {
    ProblemSpec problem;
    Method method = Method::Tangential;
    ShiftSpec shifts;
    double tol = 1e-8;
    Index max_cols = 200;
    std::string out_dir;
    unsigned seed = 1;

    void check() const;  // tol/max_cols/compatibility validation
};

struct RunOutcome {
    AdiState state;
    bool converged = false;
    double bnorm = 0.0;  // ||B^T B||_2 normalization of the stopping test
};

/// Runs the configured method. Pure computation; no files touched.
RunOutcome run_method(const LyapunovProblem& p, const RunConfig& cfg);

/// Runs and writes history.csv / summary.csv under cfg.out_dir.
/// Returns 0 on convergence, 2 when stopped without convergence.
int cmd_solve(const RunConfig& cfg);

/// Runs two configurations on the shared problem of cfg_a and writes
/// compare.csv (plus per-method histories). Relative errors against the
/// dense solve are included when n <= 200.
int cmd_compare(const RunConfig& cfg_a, const RunConfig& cfg_b);

/// Invariant suite; prints one line per check. Returns 0, or 3 on failure.
int cmd_verify(const VerifyOptions& opt);

/// Generates a problem and writes Matrix Market files into out_dir.
int cmd_gen(const ProblemSpec& spec, unsigned global_seed, const std::string& out_dir);

}  // namespace lradi

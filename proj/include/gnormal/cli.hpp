#pragma once

#include "gnormal/expectation.hpp"
#include "gnormal/model.hpp"
#include "gnormal/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gnormal::cli {

// sysexits-style codes on top of the verdict codes 0/1/2.
inline constexpr int kExitUsage = 64;
inline constexpr int kExitSoftware = 70;
inline constexpr int kExitIo = 74;

/// Test-function mini-language:
///   phi:beta=B,lambda=L,c=C,theta=T   cos:freq=F,phase=P   gauss:center=M,width=W
///   clipabs:clip=L   clippoly:clip=L,coeffs=a0;a1;...   const:V
/// Every form except const also accepts scale=S and offset=O. Unknown keys are
/// rejected with ErrorKind::usage.
TestFunctionSpec parse_test_function(std::string_view text);

/// Comma-separated numbers; "pi" and "-pi" are accepted.
std::vector<double> parse_list(std::string_view text);

struct PhiOptions {
    std::vector<double> betas{2.0};
    double x_min = -3.14159265358979323846;
    double x_max = 3.0 * 3.14159265358979323846;
    int n = 1000;
    bool derivatives = false;
    std::string out;
};

struct SolveOptions {
    std::string schedule;
    std::string init;
    double x_min = 0.0;
    double x_max = 2.0 * 3.14159265358979323846;
    int n = 1024;
    std::string boundary = "periodic";
    double cfl = 0.5;
    bool error_estimate = false;
    std::string out;
};

struct ExpectOptions {
    std::vector<std::string> generators;  // one for expect, the ordered factors for convolve
    std::string function;
    std::vector<double> times{1.0};
    std::vector<double> points{0.0};
    int n = 2048;
    double cfl = 0.5;
    std::string out;
};

struct TheoremOptions {
    std::string g1;
    std::string g2;
    std::vector<double> times{0.5, 1.0, 2.0, 4.0, 8.0};
    int n = 1024;
    std::string out;
};

struct EigenOptions {
    std::string g;
    std::vector<double> times{0.25, 1.0, 4.0};
    std::vector<double> probes{0.0, 3.14159265358979323846 / 3.0, 3.14159265358979323846};
    int n = 1024;
    double tolerance = 1e-3;
    std::string out;
};

struct SeparationOptions {
    double alpha = 1.0;
    double beta = 2.0;
    int n = 100001;
    std::string out;
};

struct ConvergenceOptions {
    std::string g = "1,2";
    double t = 1.0;
    std::vector<int> resolutions{256, 512, 1024};
    double cfl = 0.5;
    std::string out;
};

// Each command validates everything before computing, writes its CSV only on
// success (stdout when no path is given) and prints a one-line summary to `log`.
int cmd_phi(const PhiOptions& o, std::ostream& log);
int cmd_solve(const SolveOptions& o, std::ostream& log);
int cmd_expect(const ExpectOptions& o, std::ostream& log);
int cmd_convolve(const ExpectOptions& o, std::ostream& log);
int cmd_theorem1(const TheoremOptions& o, std::ostream& log);
int cmd_theorem2(const TheoremOptions& o, std::ostream& log);
int cmd_eigen_check(const EigenOptions& o, std::ostream& log);
int cmd_separation(const SeparationOptions& o, std::ostream& log);
int cmd_convergence(const ConvergenceOptions& o, std::ostream& log);

/// Full front end: subcommand dispatch, --config file (key = value lines,
/// overridden by flags), error-to-exit-code mapping.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gnormal::cli

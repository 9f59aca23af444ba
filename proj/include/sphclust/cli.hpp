#pragma once

#include "sphclust/errors.hpp"
#include "sphclust/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sphclust::cli {

enum ExitCode : int {
    kOk = 0,
    kNotConverged = 1,
    kNonGeneric = 2,
    kUsage = 3,
    kInputError = 4,
    kModelError = 5,
    kNumericalError = 6,
    kIoError = 7,
};

struct RunConfig {
    std::string input;
    IngestOptions ingest;
    std::optional<double> eta;
    /// start:stop:step or a comma list; empty means 0.1:0.9:0.1.
    std::string etas;
    std::vector<std::string> solvers;
    std::uint64_t seed = 0;
    std::string out;
    std::string table;
    std::string trace;
    std::string projection;
    std::optional<double> tol_grad;
    std::optional<double> tol_sign;
    std::optional<int> max_steps;
    /// "mean", "random", or comma-separated coordinates.
    std::string start = "mean";
    bool timings = false;
    int runs = 5;
    int subgradient_steps = 1000;
    int threads = 0;
};

/// Expands "a:b:s" (inclusive, values rounded to 12 decimals) or "a,b,c".
std::vector<double> parse_eta_grid(const std::string& grid);

/// Keeps values in (0, 1 - 1/n); warns on `warn` for each dropped value.
std::vector<double> clip_eta_grid(const std::vector<double>& etas, int n, std::ostream& warn);

SolverConfig solver_config(const RunConfig& cfg, const Dataset& data, std::uint64_t seed);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_median(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Exit code for a library error kind.
int exit_code(ErrorKind kind);

/// Parses arguments, dispatches, and maps errors to "error: <Kind>: ..." on
/// `err` with a matching exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sphclust::cli

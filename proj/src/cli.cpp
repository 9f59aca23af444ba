#include "sphclust/cli.hpp"

#include "sphclust/baselines.hpp"
#include "sphclust/errors.hpp"
#include "sphclust/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace sphclust::cli {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string> kSolverNames = {"exact", "bfgs", "lbfgs", "subgradient", "brute"};
constexpr const char* kDefaultGrid = "0.1:0.9:0.1";
constexpr std::uint64_t kMedianStream = 0x5eedULL << 32;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw Error(ErrorKind::InvalidArgument, "bad " + what + " '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        parts.push_back(cur);
    return parts;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty())
        out << text;
    else
        write_text(path, text);
}

std::vector<double> eta_grid(const RunConfig& cfg, const Dataset& data, std::ostream& err) {
    std::vector<double> raw;
    if (cfg.eta)
        raw = {*cfg.eta};
    else
        raw = parse_eta_grid(cfg.etas.empty() ? kDefaultGrid : cfg.etas);
    auto etas = clip_eta_grid(raw, data.size(), err);
    if (etas.empty())
        throw Error(ErrorKind::EtaOutOfRange, "no eta value lies in (0, 1 - 1/n) for n=" +
                                                  std::to_string(data.size()));
    return etas;
}

Dataset load(const RunConfig& cfg) {
    if (cfg.input.empty())
        throw Error(ErrorKind::InvalidArgument, "--input is required");
    return ingest(cfg.input, cfg.ingest);
}

std::vector<std::string> baseline_names(const RunConfig& cfg) {
    std::vector<std::string> out;
    for (const auto& s : cfg.solvers)
        if (s != "exact")
            out.push_back(s);
    return out;
}

BaselineResult run_baseline(const std::string& name, const Problem& problem, const Point& start,
                            const RunConfig& cfg) {
    if (name == "bfgs")
        return quasi_newton_min(problem, start, false);
    if (name == "lbfgs")
        return quasi_newton_min(problem, start, true);
    if (name == "subgradient")
        return subgradient_min(problem, start, cfg.subgradient_steps);
    if (name == "brute")
        return brute_force_min(problem, 1e-10 * problem.dataset().diameter());
    throw Error(ErrorKind::InvalidArgument, "unknown solver '" + name + "'");
}

Json step_counts_json(const std::array<int, kStepKinds>& counts) {
    Json j;
    for (int k = 0; k < kStepKinds; ++k)
        j[std::string(to_string(static_cast<StepKind>(k)))] = counts[k];
    return j;
}

struct EtaRun {
    Trajectory trajectory;
    EtaReport report;
    double exact_seconds = 0.0;
};

EtaRun run_exact(const Problem& problem, const RunConfig& cfg, std::uint64_t seed) {
    EtaRun run;
    SolverConfig sc = solver_config(cfg, problem.dataset(), seed);
    sc.record_trace = !cfg.trace.empty();
    const auto t0 = Clock::now();
    run.trajectory = solve(problem, sc);
    run.exact_seconds = seconds_since(t0);
    run.report = center_statistics(problem, run.trajectory.final_point);
    run.report.converged = run.trajectory.converged;
    run.report.gen_grad_norm = run.trajectory.final_gen_grad_norm;
    run.report.step_counts = run.trajectory.step_counts;
    if (cfg.timings)
        run.report.timings["exact"] = run.exact_seconds;
    return run;
}

int status_code(const Trajectory& t) {
    switch (t.status) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::StepLimitExceeded: return kNotConverged;
    case SolveStatus::NonGenericGeometry: return kNonGeneric;
    }
    return kNotConverged;
}

std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace

std::vector<double> parse_eta_grid(const std::string& grid) {
    const auto colon = split(grid, ':');
    std::vector<double> out;
    if (colon.size() == 3) {
        const double a = parse_number(colon[0], "grid start");
        const double b = parse_number(colon[1], "grid stop");
        const double s = parse_number(colon[2], "grid step");
        if (!(s > 0.0) || b < a)
            throw Error(ErrorKind::InvalidArgument, "grid '" + grid + "' is empty");
        for (long k = 0;; ++k) {
            const double v = std::round((a + k * s) * 1e12) / 1e12;
            if (v > b + 1e-12 * std::max(1.0, std::abs(b)))
                break;
            out.push_back(v);
        }
        return out;
    }
    if (colon.size() != 1)
        throw Error(ErrorKind::InvalidArgument, "grid must be start:stop:step or a list");
    for (const auto& part : split(grid, ','))
        out.push_back(parse_number(part, "eta"));
    if (out.empty())
        throw Error(ErrorKind::InvalidArgument, "empty eta list");
    return out;
}

std::vector<double> clip_eta_grid(const std::vector<double>& etas, int n, std::ostream& warn) {
    std::vector<double> out;
    for (double e : etas) {
        if (e > 0.0 && n * e < n - 1.0)
            out.push_back(e);
        else
            warn << "warning: eta=" << format_double(e) << " outside (0, 1-1/n) for n=" << n
                 << ", skipped\n";
    }
    return out;
}

SolverConfig solver_config(const RunConfig& cfg, const Dataset& data, std::uint64_t seed) {
    SolverConfig sc;
    if (cfg.tol_grad)
        sc.tol_grad = *cfg.tol_grad;
    if (cfg.tol_sign)
        sc.tol_sign = *cfg.tol_sign;
    if (cfg.max_steps)
        sc.max_steps = *cfg.max_steps;
    sc.seed = seed;
    if (cfg.start == "mean") {
        sc.start = StartKind::Mean;
    } else if (cfg.start == "random") {
        sc.start = StartKind::Random;
    } else {
        const auto parts = split(cfg.start, ',');
        if (static_cast<int>(parts.size()) != data.dim())
            throw Error(ErrorKind::InvalidArgument, "--start needs mean, random, or " +
                                                        std::to_string(data.dim()) +
                                                        " coordinates");
        sc.start = StartKind::Point;
        sc.start_point.resize(data.dim());
        for (int k = 0; k < data.dim(); ++k)
            sc.start_point(k) = parse_number(parts[k], "start coordinate");
    }
    sc.validate();
    return sc;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.eta)
        throw Error(ErrorKind::InvalidArgument, "solve needs --eta");
    const Dataset data = load(cfg);
    const Problem problem(data, *cfg.eta);
    EtaRun run = run_exact(problem, cfg, derive_seed(cfg.seed, 0));
    const Trajectory& t = run.trajectory;

    Json j;
    j["command"] = "solve";
    j["n"] = data.size();
    j["d"] = data.dim();
    j["eta"] = problem.eta();
    j["eta_prime"] = problem.eta_prime();
    j["status"] = std::string(to_string(t.status));
    j["converged"] = t.converged;
    j["center"] = point_to_json(t.final_point);
    j["F_value"] = t.final_f;
    j["sc_radius_sq"] = run.report.sc_radius_sq;
    j["gen_grad_norm"] = t.final_gen_grad_norm;
    j["grad_tolerance"] = t.grad_tolerance;
    j["total_steps"] = t.total_steps();
    j["step_counts"] = step_counts_json(t.step_counts);
    j["jitters"] = t.jitters;
    Json outl;
    outl["n_out_sc"] = run.report.n_out_sc;
    outl["n_out_com"] = run.report.n_out_com;
    outl["mean_cost_sc"] = run.report.mean_cost_sc ? Json(*run.report.mean_cost_sc) : Json();
    outl["mean_cost_com"] = run.report.mean_cost_com ? Json(*run.report.mean_cost_com) : Json();
    outl["outlier_ratio"] = run.report.outlier_ratio ? Json(*run.report.outlier_ratio) : Json();
    j["outliers"] = outl;

    Json solvers;
    Json exact;
    exact["F_value"] = t.final_f;
    exact["center"] = point_to_json(t.final_point);
    if (cfg.timings)
        exact["wall_time"] = run.exact_seconds;
    solvers["exact"] = exact;
    for (const auto& name : baseline_names(cfg)) {
        const BaselineResult b = run_baseline(name, problem, t.start, cfg);
        Json bj;
        bj["F_value"] = b.f_value;
        bj["center"] = point_to_json(b.final_point);
        bj["iterations"] = b.iterations;
        bj["f_evals"] = b.f_evals;
        bj["status"] = b.status == BaselineStatus::Converged        ? "Converged"
                       : b.status == BaselineStatus::IterationLimit ? "IterationLimit"
                                                                    : "LineSearchFailed";
        if (cfg.timings)
            bj["wall_time"] = b.wall_time.count();
        solvers[name] = bj;
    }
    j["solvers"] = solvers;
    if (!t.diagnostics.empty())
        j["diagnostics"] = t.diagnostics;
    emit(cfg.out, dump(j), out);

    if (!cfg.trace.empty()) {
        std::ostringstream s;
        write_trace(s, t, problem, cfg.ingest.delimiter);
        write_text(cfg.trace, s.str());
    }
    if (!cfg.projection.empty()) {
        std::ostringstream s;
        const auto table = principal_projection(
            data, {{"mean", problem.mean()}, {"sc", t.final_point}}, problem, t.final_point);
        write_projection(s, table, cfg.ingest.delimiter);
        write_text(cfg.projection, s.str());
    }
    const int code = status_code(t);
    if (code != kOk)
        err << "error: " << to_string(t.status) << ": " << t.diagnostics << '\n';
    return code;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Dataset data = load(cfg);
    const auto etas = eta_grid(cfg, data, err);
    std::vector<EtaRun> runs(etas.size());
    std::vector<std::exception_ptr> failures(etas.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < etas.size();) {
            try {
                const Problem problem(data, etas[k]);
                runs[k] = run_exact(problem, cfg, derive_seed(cfg.seed, k));
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nthreads =
        std::min<std::size_t>(etas.size(), cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < nthreads; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    for (const auto& f : failures)
        if (f)
            std::rethrow_exception(f);

    Json j;
    j["command"] = "sweep";
    j["n"] = data.size();
    j["d"] = data.dim();
    Json rows = Json::array();
    int code = kOk;
    for (const auto& r : runs) {
        rows.push_back(to_json(r.report));
        if (!r.trajectory.converged && code == kOk)
            code = status_code(r.trajectory);
    }
    j["rows"] = rows;
    emit(cfg.out, dump(j), out);

    if (!cfg.table.empty()) {
        const char dl = cfg.ingest.delimiter;
        std::ostringstream s;
        s << "eta" << dl << "F_value" << dl << "sc_radius_sq" << dl << "n_out_sc" << dl
          << "n_out_com" << dl << "mean_cost_sc" << dl << "mean_cost_com" << dl << "outlier_ratio"
          << dl << "converged";
        for (int k = 0; k < kStepKinds; ++k)
            s << dl << to_string(static_cast<StepKind>(k));
        s << '\n';
        for (const auto& r : runs) {
            const EtaReport& e = r.report;
            s << format_double(e.eta) << dl << format_double(e.f_value) << dl
              << format_double(e.sc_radius_sq) << dl << e.n_out_sc << dl << e.n_out_com << dl
              << optional_field(e.mean_cost_sc) << dl << optional_field(e.mean_cost_com) << dl
              << optional_field(e.outlier_ratio) << dl << (e.converged ? 1 : 0);
            for (int k = 0; k < kStepKinds; ++k)
                s << dl << e.step_counts[k];
            s << '\n';
        }
        write_text(cfg.table, s.str());
    }
    if (code != kOk)
        err << "error: NotConverged: at least one eta did not converge\n";
    return code;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.runs < 1)
        throw Error(ErrorKind::InvalidArgument, "--runs must be >= 1");
    const Dataset data = load(cfg);
    const auto etas = eta_grid(cfg, data, err);
    auto names = baseline_names(cfg);
    if (names.empty())
        names = {"bfgs", "lbfgs"};

    auto summary = [](const std::vector<double>& v) {
        Json s;
        s["min"] = *std::min_element(v.begin(), v.end());
        s["median"] = median_of(v);
        s["max"] = *std::max_element(v.begin(), v.end());
        return s;
    };

    Json j;
    j["command"] = "compare";
    j["n"] = data.size();
    j["d"] = data.dim();
    j["runs"] = cfg.runs;
    Json rows = Json::array();
    std::ostringstream table;
    const char dl = cfg.ingest.delimiter;
    table << "eta" << dl << "baseline" << dl << "time_min" << dl << "time_median" << dl
          << "time_max" << dl << "value_min" << dl << "value_median" << dl << "value_max\n";
    int code = kOk;
    for (std::size_t k = 0; k < etas.size(); ++k) {
        const Problem problem(data, etas[k]);
        std::map<std::string, std::vector<double>> time_ratio, value_ratio;
        for (int r = 0; r < cfg.runs; ++r) {
            const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, k), r);
            const EtaRun run = run_exact(problem, cfg, seed);
            if (!run.trajectory.converged && code == kOk)
                code = status_code(run.trajectory);
            for (const auto& name : names) {
                const BaselineResult b = run_baseline(name, problem, run.trajectory.start, cfg);
                const double tb = b.wall_time.count();
                time_ratio[name].push_back(tb > 0.0 ? run.exact_seconds / tb : 0.0);
                const double fe = run.trajectory.final_f;
                value_ratio[name].push_back(b.f_value > 0.0 ? fe / b.f_value
                                            : fe > 0.0      ? std::numeric_limits<double>::max()
                                                            : 1.0);
            }
        }
        for (const auto& name : names) {
            Json row;
            row["eta"] = etas[k];
            row["baseline"] = name;
            row["time_ratio"] = summary(time_ratio[name]);
            row["value_ratio"] = summary(value_ratio[name]);
            rows.push_back(row);
            table << format_double(etas[k]) << dl << name;
            for (const char* key : {"min", "median", "max"})
                table << dl << format_double(row["time_ratio"][key].get<double>());
            for (const char* key : {"min", "median", "max"})
                table << dl << format_double(row["value_ratio"][key].get<double>());
            table << '\n';
        }
    }
    j["rows"] = rows;
    emit(cfg.out, dump(j), out);
    if (!cfg.table.empty())
        write_text(cfg.table, table.str());
    return code;
}

int cmd_median(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Dataset data = load(cfg);
    const auto etas = eta_grid(cfg, data, err);
    std::map<double, Point> centers;
    int code = kOk;
    for (std::size_t k = 0; k < etas.size(); ++k) {
        const Problem problem(data, etas[k]);
        const EtaRun run = run_exact(problem, cfg, derive_seed(cfg.seed, k));
        if (!run.trajectory.converged && code == kOk)
            code = status_code(run.trajectory);
        centers[etas[k]] = run.trajectory.final_point;
    }
    const auto pm = projection_median(data, default_num_directions(data.dim()),
                                      derive_seed(cfg.seed, kMedianStream));
    const CenterReport rep = center_report(center_of_mass(data), centers, pm.point);
    Json j;
    j["command"] = "median";
    j["n"] = data.size();
    j["d"] = data.dim();
    j["report"] = to_json(rep);
    emit(cfg.out, dump(j), out);
    return code;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::EmptyFile:
    case ErrorKind::RaggedRows: return kInputError;
    case ErrorKind::IoError: return kIoError;
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::EtaOutOfRange:
    case ErrorKind::DegenerateData:
    case ErrorKind::DimensionTooHigh:
    case ErrorKind::RankDeficient: return kModelError;
    default: return kNumericalError;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spherical cluster center solver"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string normalize = "none";
    std::string delimiter = ",";
    std::string solvers;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Delimited numeric file, one point per row")
            ->required();
        sub->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
        sub->add_flag("--header", cfg.ingest.has_header, "Skip the first non-blank line");
        sub->add_option("--normalize", normalize, "none | minmax")
            ->check(CLI::IsMember({"none", "minmax"}))
            ->capture_default_str();
        sub->add_option("--eta", cfg.eta, "Single eta value");
        sub->add_option("--etas", cfg.etas, "start:stop:step or comma list (default 0.1:0.9:0.1)");
        sub->add_option("--solvers", solvers, "Comma list of exact,bfgs,lbfgs,subgradient,brute");
        sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
        sub->add_option("--out", cfg.out, "Structured report path (default stdout)");
        sub->add_option("--table", cfg.table, "Delimited table path");
        sub->add_option("--tol-grad", cfg.tol_grad, "Relative stationarity tolerance");
        sub->add_option("--tol-sign", cfg.tol_sign, "Sphere membership tolerance");
        sub->add_option("--max-steps", cfg.max_steps, "Step limit (default 10n+1000)");
        sub->add_option("--start", cfg.start, "mean | random | x0,x1,...")->capture_default_str();
        sub->add_flag("--timings", cfg.timings, "Include wall-clock times in the report");
        sub->add_option("--subgradient-steps", cfg.subgradient_steps)->capture_default_str();
        sub->add_option("--threads", cfg.threads, "Worker threads for sweep (0 = hardware)");
    };
    auto* solve_cmd = app.add_subcommand("solve", "Solve one (dataset, eta) instance");
    common(solve_cmd);
    solve_cmd->add_option("--trace", cfg.trace, "Per-step trace path");
    solve_cmd->add_option("--projection", cfg.projection, "Principal-plane projection path");
    auto* sweep_cmd = app.add_subcommand("sweep", "One report row per eta");
    common(sweep_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "Time and value ratios against baselines");
    common(compare_cmd);
    compare_cmd->add_option("--runs", cfg.runs, "Repetitions per eta")->capture_default_str();
    auto* median_cmd = app.add_subcommand("median", "Mean, projection median and SC centers");
    common(median_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error: Usage: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (delimiter.size() != 1)
            throw Error(ErrorKind::InvalidArgument, "--delimiter must be one character");
        cfg.ingest.delimiter = delimiter[0];
        cfg.ingest.normalize = normalize == "minmax" ? Normalize::MinMax : Normalize::None;
        if (!solvers.empty()) {
            for (const auto& s : split(solvers, ',')) {
                if (std::find(kSolverNames.begin(), kSolverNames.end(), s) == kSolverNames.end())
                    throw Error(ErrorKind::InvalidArgument, "unknown solver '" + s + "'");
                cfg.solvers.push_back(s);
            }
        }
        if (*solve_cmd)
            return cmd_solve(cfg, out, err);
        if (*sweep_cmd)
            return cmd_sweep(cfg, out, err);
        if (*compare_cmd)
            return cmd_compare(cfg, out, err);
        return cmd_median(cfg, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: Internal: " << e.what() << '\n';
        return kNumericalError;
    }
}

} // namespace sphclust::cli

// Command-line front end: generate / solve / verify / bench / plot over the
// scenario and report file formats.
//
// Exit codes: 0 success (solve: feasible; verify: feasible), 1 malformed
// input or bad arguments, 2 generation failure, 3 infeasible outcome,
// 4 solver or backend-capability failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "mrmp/bench/harness.hpp"
#include "mrmp/model.hpp"
#include "mrmp/report_io.hpp"
#include "mrmp/scenario_io.hpp"
#include "mrmp/scp.hpp"
#include "mrmp/svg.hpp"

using namespace mrmp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitGeneration = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stoi(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string& csv) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(csv.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

SeedPositions load_seed_file(const ProblemInstance& instance, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open seed file " + path);
    nlohmann::json j;
    in >> j;
    SeedPositions seed;
    for (const auto& [key, flat] : j.items()) {
        const int id = std::stoi(key);
        if (static_cast<int>(flat.size()) != (instance.T + 1) * instance.n)
            throw IoError("seed file: positions for id " + key + " must have (T+1)*n entries");
        std::vector<Vec> positions(instance.T + 1);
        for (int t = 0; t <= instance.T; ++t) {
            Vec p(instance.n);
            for (int k = 0; k < instance.n; ++k) p(k) = flat[t * instance.n + k].get<double>();
            positions[t] = std::move(p);
        }
        seed[id] = std::move(positions);
    }
    return seed;
}

struct GenerateArgs {
    std::string map = "random";
    int robots = 5;
    int obstacles = 10;
    uint64_t seed = 0;
    double diameter = 0.1;
    double gap = 0.25;
    double clearance = 0.22;
    double circle_radius = 0.4;
    int dimension = 2;
    int T = 12;
    double dt = 4.0;
    double u_max = 2.0;
    int p = 1;
    int q = 1;
    std::string output = "scenario.json";
};

int cmd_generate(const GenerateArgs& args) {
    bench::InstanceParams base{args.T, args.dt, args.u_max, args.p, args.q};
    ProblemInstance instance;
    try {
        if (args.map == "random") {
            bench::RandomMapSpec spec;
            spec.num_robots = args.robots;
            spec.num_obstacles = args.obstacles;
            spec.entity_diameter = args.diameter;
            spec.rng_seed = args.seed;
            spec.dimension = args.dimension;
            instance = bench::generate_random_instance(spec, base);
        } else {
            bench::PresetParams preset;
            preset.num_robots = args.robots;
            preset.entity_diameter = args.diameter;
            preset.gap_width = args.gap;
            preset.clearance = args.clearance;
            preset.circle_radius = args.circle_radius;
            preset.base = base;
            instance = bench::generate_preset(args.map, preset);
        }
    } catch (const bench::GenerationError& e) {
        std::fprintf(stderr, "generation failed: %s\n", e.what());
        return kExitGeneration;
    } catch (const InvalidInstance& e) {
        std::fprintf(stderr, "generation failed: %s\n", e.what());
        return kExitGeneration;
    }
    save_scenario(instance, args.output);
    std::printf("wrote %s: %zu robots, %zu obstacles, T=%d, n=%d\n", args.output.c_str(),
                instance.robots.size(), instance.obstacles.size(), instance.T, instance.n);
    return kExitOk;
}

struct SolveArgs {
    std::string scenario;
    std::string method = "parabolic";
    double eta = 50.0;
    double tol = 1e-4;
    int max_iters = 200;
    std::string seed_file;
    std::string backend = "reference";
    std::string solution_out = "solution.json";
    std::string report_out;
    std::string trace_csv;
};

int cmd_solve(const SolveArgs& args) {
    ProblemInstance instance;
    std::optional<SeedPositions> seed;
    try {
        instance = load_scenario(args.scenario);
        if (!args.seed_file.empty()) seed = load_seed_file(instance, args.seed_file);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }

    bench::HarnessParams params;
    params.eta = args.eta;
    params.rel_obj_tol = args.tol;
    params.max_iters = args.max_iters;

    SolveReport report;
    try {
        std::unique_ptr<conic::Backend> backend;
        if (args.backend == "reference")
            backend = std::make_unique<conic::IpmBackend>();
        else if (args.backend == "socp")
            backend = std::make_unique<conic::SocpOnlyBackend>();
        else {
            std::fprintf(stderr, "unknown backend: %s\n", args.backend.c_str());
            return kExitBadInput;
        }
        report = bench::run_method(args.method, instance, seed, params, *backend);
    } catch (const conic::CapabilityError& e) {
        std::fprintf(stderr, "backend capability error: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }

    if (!report.final_solution.states.empty()) {
        const auto feas = verify(instance, report.final_solution);
        save_solution(instance, report.final_solution, feas, args.solution_out);
    }
    if (!args.report_out.empty()) save_report_json(instance, report, args.report_out);
    if (!args.trace_csv.empty()) save_report_csv(report, args.trace_csv);

    std::printf("method=%s termination=%s iterations=%zu objective=%.9g feasible=%d\n",
                report.method.c_str(), termination_name(report.termination),
                report.iterations.size(),
                report.final_solution.states.empty()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : report.final_solution.objective,
                static_cast<int>(report.feasible));

    if (report.termination == Termination::subproblem_failure) return kExitSolverFailure;
    return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_verify(const std::string& scenario_path, const std::string& solution_path) {
    try {
        const auto instance = load_scenario(scenario_path);
        const auto solution = load_solution(instance, solution_path);
        const auto report = verify(instance, solution);
        std::printf(
            "dynamics_residual=%.6e boundary_residual=%.6e control_violation=%.6e "
            "collision_violation=%.6e feasible=%d\n",
            report.dynamics_residual, report.boundary_residual, report.control_violation,
            report.collision_violation, static_cast<int>(report.feasible));
        return report.feasible ? kExitOk : kExitInfeasible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }
}

struct BenchArgs {
    std::string mode = "success-rate";
    std::string methods = "parabolic,scp";
    std::string obstacles = "10,20,30";
    std::string counts = "2,4,8,16";
    int robots = 5;
    int trials = 20;
    int dimension = 2;
    uint64_t seed = 0;
    int T = 12;
    double dt = 4.0;
    double u_max = 2.0;
    double eta = 50.0;
    double tol = 1e-4;
    int max_iters = 200;
    double corner_x = 0.08;
    double corner_y = 0.08;
    bool serial = false;
    std::string outdir = ".";
};

int cmd_bench(const BenchArgs& args) {
    bench::HarnessParams params;
    params.instance = {args.T, args.dt, args.u_max, 1, 1};
    params.eta = args.eta;
    params.rel_obj_tol = args.tol;
    params.max_iters = args.max_iters;
    params.parallel = !args.serial;
    std::filesystem::create_directories(args.outdir);

    auto write_file = [&](const std::string& name, const std::string& content) {
        const std::string path = args.outdir + "/" + name;
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << content;
        std::printf("wrote %s\n", path.c_str());
    };

    try {
        if (args.mode == "success-rate") {
            const auto result =
                bench::run_success_rate(parse_string_list(args.methods),
                                        parse_int_list(args.obstacles), args.robots, args.trials,
                                        args.seed, params);
            write_file("success_rate.csv", result.csv);
            write_file("success_rate_meta.json",
                       std::string("{\"rng\": \"") + result.rng_algorithm +
                           "\", \"generation_failures\": " +
                           std::to_string(result.generation_failures) + "}\n");
            std::fputs(result.csv.c_str(), stdout);
        } else if (args.mode == "scaling") {
            const auto result =
                bench::run_scaling(parse_string_list(args.methods), parse_int_list(args.counts),
                                   args.dimension, args.trials, args.seed, params);
            write_file("scaling.csv", result.csv);
            write_file("scaling_meta.json",
                       std::string("{\"rng\": \"") + result.rng_algorithm +
                           "\", \"generation_failures\": " +
                           std::to_string(result.generation_failures) + "}\n");
            std::fputs(result.csv.c_str(), stdout);
        } else if (args.mode == "bad-seed") {
            bench::PresetParams preset;
            preset.num_robots = args.robots;
            preset.base = params.instance;
            const auto instance = bench::generate_preset("swap_circle", preset);
            Vec corner(2);
            corner << args.corner_x, args.corner_y;
            const auto seed = bench::point_routed_seed(instance, corner);
            const auto report = bench::run_bad_seed_recovery(instance, seed, params);
            write_file("bad_seed_trace.csv", report_csv_string(report));
            std::printf("termination=%s feasible=%d iterations=%zu\n",
                        termination_name(report.termination), static_cast<int>(report.feasible),
                        report.iterations.size());
            if (report.termination == Termination::subproblem_failure) return kExitSolverFailure;
        } else {
            std::fprintf(stderr, "unknown bench mode: %s\n", args.mode.c_str());
            return kExitBadInput;
        }
    } catch (const bench::GenerationError& e) {
        std::fprintf(stderr, "generation failed: %s\n", e.what());
        return kExitGeneration;
    } catch (const conic::CapabilityError& e) {
        std::fprintf(stderr, "backend capability error: %s\n", e.what());
        return kExitSolverFailure;
    }
    return kExitOk;
}

int cmd_plot(const std::string& scenario_path, const std::string& solution_path,
             const std::string& output) {
    try {
        const auto instance = load_scenario(scenario_path);
        Solution solution;
        if (!solution_path.empty()) solution = load_solution(instance, solution_path);
        save_svg(instance, solution, output);
        std::printf("wrote %s\n", output.c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-robot motion planning via penalized conic relaxation"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a scenario file");
    generate->add_option("--map", gen.map, "random|bottleneck|maze|swap_circle")
        ->default_val("random");
    generate->add_option("--robots", gen.robots, "number of robots")->default_val(5);
    generate->add_option("--obstacles", gen.obstacles, "number of obstacles (random map)")
        ->default_val(10);
    generate->add_option("--seed", gen.seed, "rng seed")->default_val(0);
    generate->add_option("--diameter", gen.diameter, "entity diameter, meters")->default_val(0.1);
    generate->add_option("--gap", gen.gap, "bottleneck gap width, meters")->default_val(0.25);
    generate->add_option("--clearance", gen.clearance, "maze corridor clearance, meters")
        ->default_val(0.22);
    generate->add_option("--circle-radius", gen.circle_radius, "swap_circle radius, meters")
        ->default_val(0.4);
    generate->add_option("--dimension", gen.dimension, "2 or 3 (random map)")->default_val(2);
    generate->add_option("--T", gen.T, "control steps")->default_val(12);
    generate->add_option("--dt", gen.dt, "time step, seconds")->default_val(4.0);
    generate->add_option("--u-max", gen.u_max, "control bound")->default_val(2.0);
    generate->add_option("--p", gen.p, "control-bound norm (1 or 2)")->default_val(1);
    generate->add_option("--q", gen.q, "objective norm (1 or 2)")->default_val(1);
    generate->add_option("-o,--output", gen.output, "scenario path")
        ->default_val("scenario.json");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Solve a scenario");
    solve->add_option("scenario", sol.scenario, "scenario JSON path")->required();
    solve->add_option("--method", sol.method, "parabolic|parabolic-full|sdp|scp")
        ->default_val("parabolic");
    solve->add_option("--eta", sol.eta, "penalty weight")->default_val(50.0);
    solve->add_option("--tol", sol.tol, "relative objective stopping tolerance")
        ->default_val(1e-4);
    solve->add_option("--max-iters", sol.max_iters, "outer iteration cap")->default_val(200);
    solve->add_option("--seed-file", sol.seed_file,
                      "JSON map id -> flat (T+1)*n positions used as the initial seed");
    solve->add_option("--backend", sol.backend, "reference|socp")->default_val("reference");
    solve->add_option("-o,--output", sol.solution_out, "solution JSON path")
        ->default_val("solution.json");
    solve->add_option("--report", sol.report_out, "solve report JSON path");
    solve->add_option("--trace-csv", sol.trace_csv, "convergence trace CSV path");

    std::string verify_scenario, verify_solution;
    auto* verify_cmd = app.add_subcommand("verify", "Verify a solution against a scenario");
    verify_cmd->add_option("scenario", verify_scenario, "scenario JSON path")->required();
    verify_cmd->add_option("solution", verify_solution, "solution JSON path")->required();

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "Run experiment harnesses");
    bench_cmd->add_option("--mode", bench_args.mode, "success-rate|scaling|bad-seed")
        ->default_val("success-rate");
    bench_cmd->add_option("--methods", bench_args.methods, "comma-separated method list")
        ->default_val("parabolic,scp");
    bench_cmd->add_option("--obstacles", bench_args.obstacles, "obstacle counts, comma-separated")
        ->default_val("10,20,30");
    bench_cmd->add_option("--counts", bench_args.counts, "robot counts, comma-separated")
        ->default_val("2,4,8,16");
    bench_cmd->add_option("--robots", bench_args.robots, "robots per instance")->default_val(5);
    bench_cmd->add_option("--trials", bench_args.trials, "trials per sweep point")
        ->default_val(20);
    bench_cmd->add_option("--dimension", bench_args.dimension, "2 or 3")->default_val(2);
    bench_cmd->add_option("--seed", bench_args.seed, "base rng seed")->default_val(0);
    bench_cmd->add_option("--T", bench_args.T, "control steps")->default_val(12);
    bench_cmd->add_option("--dt", bench_args.dt, "time step, seconds")->default_val(4.0);
    bench_cmd->add_option("--u-max", bench_args.u_max, "control bound")->default_val(2.0);
    bench_cmd->add_option("--eta", bench_args.eta, "penalty weight")->default_val(50.0);
    bench_cmd->add_option("--tol", bench_args.tol, "stopping tolerance")->default_val(1e-4);
    bench_cmd->add_option("--max-iters", bench_args.max_iters, "outer iteration cap")
        ->default_val(200);
    bench_cmd->add_option("--corner-x", bench_args.corner_x, "bad-seed shared point x")
        ->default_val(0.08);
    bench_cmd->add_option("--corner-y", bench_args.corner_y, "bad-seed shared point y")
        ->default_val(0.08);
    bench_cmd->add_flag("--serial", bench_args.serial, "disable trial parallelism");
    bench_cmd->add_option("-o,--outdir", bench_args.outdir, "output directory")
        ->default_val(".");

    std::string plot_scenario, plot_solution, plot_output = "plot.svg";
    auto* plot = app.add_subcommand("plot", "Render a scenario/solution to SVG");
    plot->add_option("scenario", plot_scenario, "scenario JSON path")->required();
    plot->add_option("solution", plot_solution, "solution JSON path (optional)");
    plot->add_option("-o,--output", plot_output, "SVG path")->default_val("plot.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (solve->parsed()) return cmd_solve(sol);
        if (verify_cmd->parsed()) return cmd_verify(verify_scenario, verify_solution);
        if (bench_cmd->parsed()) return cmd_bench(bench_args);
        if (plot->parsed()) return cmd_plot(plot_scenario, plot_solution, plot_output);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadInput;
    }
    return kExitBadInput;
}

#include "mrmp/bench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "mrmp/model.hpp"
#include "mrmp/parallel.hpp"
#include "mrmp/rng.hpp"
#include "mrmp/scp.hpp"

namespace mrmp::bench {

namespace {

std::string canonical_method(const std::string& name) {
    if (name == "parabolic_simplified") return "parabolic";
    if (name == "parabolic_full") return "parabolic-full";
    return name;
}

std::string format_row(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

bool is_known_method(const std::string& name) {
    const std::string m = canonical_method(name);
    return m == "parabolic" || m == "parabolic-full" || m == "sdp" || m == "scp";
}

SolveReport run_method(const std::string& method, const ProblemInstance& instance,
                       const std::optional<SeedPositions>& seed, const HarnessParams& params,
                       conic::Backend& backend) {
    const std::string m = canonical_method(method);
    if (m == "scp") {
        ScpConfig config;
        config.rel_obj_tol = params.rel_obj_tol;
        config.max_iters = params.max_iters;
        return solve_scp(instance, seed, config, backend);
    }
    SequentialConfig config;
    config.eta = params.eta;
    config.rel_obj_tol = params.rel_obj_tol;
    config.max_iters = params.max_iters;
    config.fix_obstacle_y = params.fix_obstacle_y;
    if (m == "parabolic")
        config.variant = relax::Variant::parabolic_simplified;
    else if (m == "parabolic-full")
        config.variant = relax::Variant::parabolic_full;
    else if (m == "sdp")
        config.variant = relax::Variant::sdp;
    else
        throw std::invalid_argument("unknown method: " + method);
    return solve_sequential(instance, seed, config, backend);
}

namespace {

TrialRecord run_trial(const std::string& method, const ProblemInstance& instance,
                      const HarnessParams& params) {
    conic::IpmBackend backend;
    TrialRecord record;
    record.method = canonical_method(method);
    record.generated = true;
    const auto report = run_method(method, instance, std::nullopt, params, backend);
    record.status = termination_name(report.termination);
    record.iterations = static_cast<int>(report.iterations.size());
    record.total_time = report.total_time;
    record.final_max_gap = report.final_max_gap;
    double time_sum = 0.0;
    for (const auto& it : report.iterations) time_sum += it.subproblem_time;
    record.mean_subproblem_time =
        report.iterations.empty() ? 0.0 : time_sum / report.iterations.size();
    if (!report.final_solution.states.empty()) {
        record.objective = report.final_solution.objective;
        // Success is decided by the verifier, never by solver self-report.
        record.feasible = verify(instance, report.final_solution).feasible;
    }
    return record;
}

}  // namespace

ExperimentResult run_success_rate(const std::vector<std::string>& methods,
                                  const std::vector<int>& obstacle_counts, int num_robots,
                                  int trials, uint64_t base_rng_seed,
                                  const HarnessParams& params) {
    for (const auto& m : methods)
        if (!is_known_method(m)) throw std::invalid_argument("unknown method: " + m);

    ExperimentResult result;
    result.rng_algorithm = std::string(SplitMix64::kAlgorithm);

    struct Task {
        int group_idx, trial, method_idx;
    };
    std::vector<Task> tasks;
    for (int g = 0; g < static_cast<int>(obstacle_counts.size()); ++g)
        for (int t = 0; t < trials; ++t)
            for (int m = 0; m < static_cast<int>(methods.size()); ++m)
                tasks.push_back({g, t, m});
    std::vector<TrialRecord> records(tasks.size());

    const int64_t num_tasks = static_cast<int64_t>(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (params.parallel)
#endif
    for (int64_t i = 0; i < num_tasks; ++i) {
        const Task task = tasks[i];
        RandomMapSpec spec;
        spec.num_robots = num_robots;
        spec.num_obstacles = obstacle_counts[task.group_idx];
        spec.entity_diameter = params.entity_diameter;
        spec.max_placement_attempts = params.max_placement_attempts;
        spec.rng_seed = base_rng_seed + static_cast<uint64_t>(task.trial);
        TrialRecord record;
        record.group = obstacle_counts[task.group_idx];
        record.trial = task.trial;
        record.rng_seed = spec.rng_seed;
        record.method = canonical_method(methods[task.method_idx]);
        try {
            const auto instance = generate_random_instance(spec, params.instance);
            TrialRecord solved = run_trial(methods[task.method_idx], instance, params);
            solved.group = record.group;
            solved.trial = record.trial;
            solved.rng_seed = record.rng_seed;
            record = solved;
        } catch (const GenerationError&) {
            record.generated = false;
            record.status = "generation_failure";
        }
        records[i] = std::move(record);
    }
    result.records = std::move(records);
    for (const auto& r : result.records)
        if (!r.generated) ++result.generation_failures;

    // Aggregate: per (obstacles, method). mean_objective averages the trials
    // where every method succeeded, making quality numbers comparable.
    std::string csv = "obstacles,method,trials,successes,success_rate,mean_objective,mean_time\n";
    for (int g = 0; g < static_cast<int>(obstacle_counts.size()); ++g) {
        std::vector<int> mutual;  // trial indices where all methods succeeded
        for (int t = 0; t < trials; ++t) {
            bool all_ok = true;
            bool all_generated = true;
            for (size_t m = 0; m < methods.size(); ++m) {
                const auto& r = result.records[(g * trials + t) * methods.size() + m];
                all_ok &= r.feasible;
                all_generated &= r.generated;
            }
            if (all_ok && all_generated) mutual.push_back(t);
        }
        for (size_t m = 0; m < methods.size(); ++m) {
            int generated = 0, successes = 0;
            double time_sum = 0.0, mutual_obj = 0.0;
            for (int t = 0; t < trials; ++t) {
                const auto& r = result.records[(g * trials + t) * methods.size() + m];
                if (!r.generated) continue;
                ++generated;
                time_sum += r.total_time;
                if (r.feasible) ++successes;
            }
            for (int t : mutual)
                mutual_obj += result.records[(g * trials + t) * methods.size() + m].objective;
            const double rate = generated > 0 ? static_cast<double>(successes) / generated : 0.0;
            const double mean_obj =
                mutual.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : mutual_obj / mutual.size();
            const double mean_time = generated > 0 ? time_sum / generated : 0.0;
            csv += format_row("%d,%s,%d,%d,%.12g,%.12g,%.6g\n", obstacle_counts[g],
                              canonical_method(methods[m]).c_str(), generated, successes, rate,
                              mean_obj, mean_time);
        }
    }
    result.csv = std::move(csv);
    return result;
}

ExperimentResult run_scaling(const std::vector<std::string>& variants,
                             const std::vector<int>& robot_counts, int dimension, int trials,
                             uint64_t base_rng_seed, const HarnessParams& params) {
    for (const auto& m : variants)
        if (!is_known_method(m)) throw std::invalid_argument("unknown method: " + m);

    ExperimentResult result;
    result.rng_algorithm = std::string(SplitMix64::kAlgorithm);

    struct Task {
        int group_idx, trial, method_idx;
    };
    std::vector<Task> tasks;
    for (int g = 0; g < static_cast<int>(robot_counts.size()); ++g)
        for (int t = 0; t < trials; ++t)
            for (int m = 0; m < static_cast<int>(variants.size()); ++m)
                tasks.push_back({g, t, m});
    std::vector<TrialRecord> records(tasks.size());

    const int64_t num_tasks = static_cast<int64_t>(tasks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (params.parallel)
#endif
    for (int64_t i = 0; i < num_tasks; ++i) {
        const Task task = tasks[i];
        RandomMapSpec spec;
        spec.dimension = dimension;
        spec.num_robots = robot_counts[task.group_idx];
        spec.num_obstacles = 0;
        spec.entity_diameter = params.entity_diameter;
        spec.max_placement_attempts = params.max_placement_attempts;
        spec.rng_seed = base_rng_seed + static_cast<uint64_t>(task.trial);
        TrialRecord record;
        record.group = robot_counts[task.group_idx];
        record.trial = task.trial;
        record.rng_seed = spec.rng_seed;
        record.method = canonical_method(variants[task.method_idx]);
        try {
            const auto instance = generate_random_instance(spec, params.instance);
            TrialRecord solved = run_trial(variants[task.method_idx], instance, params);
            solved.group = record.group;
            solved.trial = record.trial;
            solved.rng_seed = record.rng_seed;
            record = solved;
        } catch (const GenerationError&) {
            record.generated = false;
            record.status = "generation_failure";
        }
        records[i] = std::move(record);
    }
    result.records = std::move(records);
    for (const auto& r : result.records)
        if (!r.generated) ++result.generation_failures;

    std::string csv =
        "robots,dimension,variant,mean_subproblem_time,mean_total_time,converged_fraction\n";
    for (int g = 0; g < static_cast<int>(robot_counts.size()); ++g) {
        for (size_t m = 0; m < variants.size(); ++m) {
            double sub_time = 0.0, total_time = 0.0;
            int sub_count = 0, generated = 0, converged = 0;
            for (int t = 0; t < trials; ++t) {
                const auto& r = result.records[(g * trials + t) * variants.size() + m];
                if (!r.generated) continue;
                ++generated;
                total_time += r.total_time;
                sub_time += r.mean_subproblem_time * r.iterations;
                sub_count += r.iterations;
                if (r.status == "converged") ++converged;
            }
            const double mean_sub = sub_count > 0 ? sub_time / sub_count : 0.0;
            const double mean_total = generated > 0 ? total_time / generated : 0.0;
            const double frac = generated > 0 ? static_cast<double>(converged) / generated : 0.0;
            csv += format_row("%d,%d,%s,%.6g,%.6g,%.12g\n", robot_counts[g], dimension,
                              canonical_method(variants[m]).c_str(), mean_sub, mean_total, frac);
        }
    }
    result.csv = std::move(csv);
    return result;
}

SolveReport run_bad_seed_recovery(const ProblemInstance& instance,
                                  const SeedPositions& adversarial_seed,
                                  const HarnessParams& params) {
    conic::IpmBackend backend;
    return run_method("parabolic", instance, adversarial_seed, params, backend);
}

}  // namespace mrmp::bench

#include "mrmp/report_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mrmp/model.hpp"
#include "mrmp/scenario_io.hpp"

namespace mrmp {

using nlohmann::json;

void save_report_json(const ProblemInstance& instance, const SolveReport& report,
                      const std::string& path) {
    json j;
    j["method"] = report.method;
    j["termination"] = termination_name(report.termination);
    j["feasible"] = report.feasible;
    j["final_max_gap"] = report.final_max_gap;
    j["total_time"] = report.total_time;
    j["iterations"] = json::array();
    for (const auto& it : report.iterations) {
        j["iterations"].push_back({{"iter", it.iter},
                                   {"true_objective", it.true_objective},
                                   {"penalized_objective", it.penalized_objective},
                                   {"max_gap", it.max_gap},
                                   {"collision_violation", it.collision_violation},
                                   {"subproblem_time", it.subproblem_time}});
    }
    if (!report.final_solution.states.empty()) {
        json sol;
        sol["objective"] = report.final_solution.objective;
        json states;
        for (const auto& [id, xs] : report.final_solution.states) {
            json flat = json::array();
            for (const auto& x : xs)
                for (int k = 0; k < x.size(); ++k) flat.push_back(x(k));
            states[std::to_string(id)] = std::move(flat);
        }
        sol["states"] = std::move(states);
        json controls;
        for (const auto& [id, us] : report.final_solution.controls) {
            json flat = json::array();
            for (const auto& u : us)
                for (int k = 0; k < u.size(); ++k) flat.push_back(u(k));
            controls[std::to_string(id)] = std::move(flat);
        }
        sol["controls"] = std::move(controls);
        j["solution"] = std::move(sol);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string report_csv_string(const SolveReport& report) {
    std::string csv = "iter,true_objective,penalized_objective,max_gap,collision_violation,time\n";
    char line[256];
    for (const auto& it : report.iterations) {
        std::snprintf(line, sizeof(line), "%d,%.12g,%.12g,%.12g,%.12g,%.6g\n", it.iter,
                      it.true_objective, it.penalized_objective, it.max_gap,
                      it.collision_violation, it.subproblem_time);
        csv += line;
    }
    return csv;
}

void save_report_csv(const SolveReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << report_csv_string(report);
}

}  // namespace mrmp

#include "mrmp/scenario_io.hpp"

#include <fstream>

#include <json.hpp>

#include "mrmp/model.hpp"

namespace mrmp {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& a, int expected, const std::string& what) {
    if (!a.is_array() || static_cast<int>(a.size()) != expected)
        throw IoError("scenario: " + what + " must be an array of length " +
                      std::to_string(expected));
    Vec v(expected);
    for (int i = 0; i < expected; ++i) v(i) = a[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json a = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
    return a;
}

Mat mat_from_json(const json& a, int rows, int cols, const std::string& what) {
    if (!a.is_array() || static_cast<int>(a.size()) != rows * cols)
        throw IoError("scenario: " + what + " must be a row-major array of length " +
                      std::to_string(rows * cols));
    Mat m(rows, cols);
    int idx = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = a[idx++].get<double>();
    return m;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

ProblemInstance load_scenario(const std::string& path) {
    const json j = load_json_file(path);
    try {
        if (j.value("version", 0) != 1) throw IoError("scenario: unsupported version");
        ProblemInstance instance;
        instance.n = j.at("n").get<int>();
        instance.T = j.at("T").get<int>();
        instance.p = j.at("p").get<int>();
        instance.q = j.at("q").get<int>();
        instance.dt = j.at("dt").get<double>();
        const int sd = 2 * instance.n;

        for (const auto& rj : j.at("robots")) {
            RobotSpec robot;
            robot.id = rj.at("id").get<int>();
            robot.radius = rj.at("radius").get<double>();
            robot.u_max = rj.at("u_max").get<double>();
            robot.x_init = vec_from_json(rj.at("x_init"), sd, "x_init");
            robot.x_goal = vec_from_json(rj.at("x_goal"), sd, "x_goal");
            if (rj.contains("A") || rj.contains("B")) {
                if (!rj.contains("A") || !rj.contains("B"))
                    throw IoError("scenario: A and B must be given together");
                DynamicsModel dyn;
                dyn.n = instance.n;
                dyn.dt = instance.dt;
                dyn.A = mat_from_json(rj.at("A"), sd, sd, "A");
                const int m = static_cast<int>(rj.at("B").size()) / sd;
                dyn.m = m;
                dyn.B = mat_from_json(rj.at("B"), sd, m, "B");
                robot.dynamics = dyn;
            } else {
                robot.dynamics = build_double_integrator(instance.n, instance.dt);
            }
            instance.robots.push_back(std::move(robot));
        }
        for (const auto& oj : j.value("obstacles", json::array())) {
            ObstacleSpec obstacle;
            obstacle.id = oj.at("id").get<int>();
            obstacle.radius = oj.at("radius").get<double>();
            const auto& flat = oj.at("states");
            if (!flat.is_array() || static_cast<int>(flat.size()) != (instance.T + 1) * sd)
                throw IoError("scenario: obstacle states must be a (T+1) x 2n row-major array");
            for (int t = 0; t <= instance.T; ++t) {
                Vec x(sd);
                for (int k = 0; k < sd; ++k) x(k) = flat[t * sd + k].get<double>();
                obstacle.states.push_back(std::move(x));
            }
            instance.obstacles.push_back(std::move(obstacle));
        }
        instance.validate();
        return instance;
    } catch (const json::exception& e) {
        throw IoError(std::string("scenario: ") + e.what());
    }
}

void save_scenario(const ProblemInstance& instance, const std::string& path) {
    json j;
    j["version"] = 1;
    j["n"] = instance.n;
    j["T"] = instance.T;
    j["p"] = instance.p;
    j["q"] = instance.q;
    j["dt"] = instance.dt;
    j["robots"] = json::array();
    const auto reference = build_double_integrator(instance.n, instance.dt);
    for (const auto& robot : instance.robots) {
        json rj;
        rj["id"] = robot.id;
        rj["radius"] = robot.radius;
        rj["u_max"] = robot.u_max;
        rj["x_init"] = vec_to_json(robot.x_init);
        rj["x_goal"] = vec_to_json(robot.x_goal);
        const bool is_default = robot.dynamics.m == reference.m &&
                                robot.dynamics.A == reference.A && robot.dynamics.B == reference.B;
        if (!is_default) {
            rj["A"] = mat_to_json(robot.dynamics.A);
            rj["B"] = mat_to_json(robot.dynamics.B);
        }
        j["robots"].push_back(std::move(rj));
    }
    j["obstacles"] = json::array();
    for (const auto& obstacle : instance.obstacles) {
        json oj;
        oj["id"] = obstacle.id;
        oj["radius"] = obstacle.radius;
        json flat = json::array();
        for (const auto& x : obstacle.states)
            for (int k = 0; k < x.size(); ++k) flat.push_back(x(k));
        oj["states"] = std::move(flat);
        j["obstacles"].push_back(std::move(oj));
    }
    write_json_file(j, path);
}

void save_solution(const ProblemInstance& instance, const Solution& solution,
                   const FeasibilityReport& report, const std::string& path) {
    json j;
    j["objective"] = solution.objective;
    json states;
    for (const auto& [id, xs] : solution.states) {
        json flat = json::array();
        for (const auto& x : xs)
            for (int k = 0; k < x.size(); ++k) flat.push_back(x(k));
        states[std::to_string(id)] = std::move(flat);
    }
    j["states"] = std::move(states);
    json controls;
    for (const auto& [id, us] : solution.controls) {
        json flat = json::array();
        for (const auto& u : us)
            for (int k = 0; k < u.size(); ++k) flat.push_back(u(k));
        controls[std::to_string(id)] = std::move(flat);
    }
    j["controls"] = std::move(controls);
    j["report"] = {{"dynamics_residual", report.dynamics_residual},
                   {"boundary_residual", report.boundary_residual},
                   {"control_violation", report.control_violation},
                   {"collision_violation", report.collision_violation},
                   {"feasible", report.feasible}};
    write_json_file(j, path);
}

Solution load_solution(const ProblemInstance& instance, const std::string& path) {
    const json j = load_json_file(path);
    try {
        Solution solution;
        solution.objective = j.at("objective").get<double>();
        const int sd = 2 * instance.n;
        for (const auto& [key, flat] : j.at("states").items()) {
            const int id = std::stoi(key);
            if (static_cast<int>(flat.size()) != (instance.T + 1) * sd)
                throw IoError("solution: state array for id " + key + " has wrong length");
            std::vector<Vec> xs(instance.T + 1);
            for (int t = 0; t <= instance.T; ++t) {
                Vec x(sd);
                for (int k = 0; k < sd; ++k) x(k) = flat[t * sd + k].get<double>();
                xs[t] = std::move(x);
            }
            solution.states[id] = std::move(xs);
        }
        for (const auto& [key, flat] : j.at("controls").items()) {
            const int id = std::stoi(key);
            const auto* robot = instance.find_robot(id);
            if (!robot) throw IoError("solution: controls for unknown robot " + key);
            const int m = robot->dynamics.m;
            if (static_cast<int>(flat.size()) != instance.T * m)
                throw IoError("solution: control array for id " + key + " has wrong length");
            std::vector<Vec> us(instance.T);
            for (int t = 0; t < instance.T; ++t) {
                Vec u(m);
                for (int k = 0; k < m; ++k) u(k) = flat[t * m + k].get<double>();
                us[t] = std::move(u);
            }
            solution.controls[id] = std::move(us);
        }
        return solution;
    } catch (const json::exception& e) {
        throw IoError(std::string("solution: ") + e.what());
    }
}

}  // namespace mrmp

#include <doctest.h>

#include <fstream>

#include "mrmp/bench/generators.hpp"
#include "mrmp/bench/harness.hpp"
#include "mrmp/model.hpp"
#include "mrmp/scenario_io.hpp"

using namespace mrmp;
using namespace mrmp::bench;

TEST_CASE("random instances validate and respect separations") {
    RandomMapSpec spec;
    spec.num_robots = 5;
    spec.num_obstacles = 30;
    spec.rng_seed = 11;
    int generated = 0;
    for (uint64_t s = 0; s < 8; ++s) {
        spec.rng_seed = 100 + s;
        const auto instance = generate_random_instance(spec, InstanceParams{});
        instance.validate();
        ++generated;
        // Start separation oracle: brute-force pairwise distances.
        std::vector<Vec> starts;
        for (const auto& robot : instance.robots) starts.push_back(robot.x_init.head(2));
        for (const auto& obstacle : instance.obstacles)
            starts.push_back(obstacle.states[0].head(2));
        for (size_t a = 0; a < starts.size(); ++a)
            for (size_t b = a + 1; b < starts.size(); ++b)
                CHECK((starts[a] - starts[b]).norm() >= spec.entity_diameter - 1e-12);
    }
    CHECK(generated == 8);
}

TEST_CASE("identical seeds give identical instances, byte for byte") {
    RandomMapSpec spec;
    spec.num_robots = 3;
    spec.num_obstacles = 8;
    spec.rng_seed = 7;
    const auto a = generate_random_instance(spec, InstanceParams{});
    const auto b = generate_random_instance(spec, InstanceParams{});
    const std::string pa = "/tmp/mrmp_test_gen_a.json";
    const std::string pb = "/tmp/mrmp_test_gen_b.json";
    save_scenario(a, pa);
    save_scenario(b, pb);
    std::ifstream fa(pa), fb(pb);
    const std::string ca((std::istreambuf_iterator<char>(fa)), {});
    const std::string cb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(ca == cb);
    CHECK(!ca.empty());
}

TEST_CASE("single robot map always generates") {
    RandomMapSpec spec;
    spec.num_robots = 1;
    spec.num_obstacles = 0;
    for (uint64_t s = 0; s < 20; ++s) {
        spec.rng_seed = s;
        CHECK_NOTHROW(generate_random_instance(spec, InstanceParams{}).validate());
    }
}

TEST_CASE("impossible densities fail with a generation error") {
    RandomMapSpec spec;
    spec.num_robots = 10;
    spec.num_obstacles = 300;
    spec.max_placement_attempts = 2000;
    CHECK_THROWS_AS(generate_random_instance(spec, InstanceParams{}), GenerationError);
}

TEST_CASE("swap_circle preset is symmetric and valid") {
    PresetParams params;
    params.num_robots = 2;
    params.circle_radius = 0.4;
    const auto instance = generate_preset("swap_circle", params);
    instance.validate();
    REQUIRE(instance.robots.size() == 2);
    // Antipodal start/goal.
    for (const auto& robot : instance.robots) {
        const Vec center = 0.5 * (robot.x_init.head(2) + robot.x_goal.head(2));
        CHECK((center - 0.5 * Vec::Ones(2)).norm() < 1e-12);
    }
}

TEST_CASE("bottleneck preset blocks the straight-line seed") {
    PresetParams params;
    params.num_robots = 3;
    params.gap_width = 0.25;  // 2.5x robot diameter
    const auto instance = generate_preset("bottleneck", params);
    instance.validate();
    CHECK(seed_collision_violation(instance, straight_line_seed(instance)) > 0.0);
}

TEST_CASE("maze with sub-diameter clearance is rejected") {
    PresetParams params;
    params.clearance = 0.05;  // < diameter 0.1
    CHECK_THROWS_AS(generate_preset("maze", params), GenerationError);
    params.clearance = 0.3;
    CHECK_NOTHROW(generate_preset("maze", params).validate());
    CHECK_THROWS_AS(generate_preset("nonsense", params), GenerationError);
}

TEST_CASE("point-routed seed passes through the shared point") {
    PresetParams params;
    params.num_robots = 4;
    const auto instance = generate_preset("swap_circle", params);
    Vec corner(2);
    corner << 0.1, 0.1;
    const auto seed = point_routed_seed(instance, corner);
    for (const auto& robot : instance.robots) {
        const auto& positions = seed.at(robot.id);
        REQUIRE(static_cast<int>(positions.size()) == instance.T + 1);
        CHECK((positions[instance.T / 2] - corner).norm() < 1e-12);
        CHECK((positions.front() - robot.x_init.head(2)).norm() < 1e-12);
        CHECK((positions.back() - robot.x_goal.head(2)).norm() < 1e-12);
    }
}

TEST_CASE("success-rate harness is deterministic and self-consistent") {
    HarnessParams params;
    params.instance.T = 10;
    params.instance.dt = 3.0;
    params.max_iters = 40;
    const auto a = run_success_rate({"parabolic"}, {0}, 1, 2, 5, params);
    const auto b = run_success_rate({"parabolic"}, {0}, 1, 2, 5, params);
    // Identical except the wall-clock mean_time column.
    auto drop_last_column = [](const std::string& csv) {
        std::string out;
        size_t pos = 0;
        while (pos < csv.size()) {
            size_t eol = csv.find('\n', pos);
            if (eol == std::string::npos) eol = csv.size();
            const std::string line = csv.substr(pos, eol - pos);
            out += line.substr(0, line.rfind(',')) + "\n";
            pos = eol + 1;
        }
        return out;
    };
    CHECK(drop_last_column(a.csv) == drop_last_column(b.csv));
    // A single robot with no obstacles always succeeds.
    CHECK(a.csv.find("0,parabolic,2,2,1,") != std::string::npos);
    CHECK(a.rng_algorithm == "splitmix64-v1");
}

TEST_CASE("scaling harness row counts and determinism") {
    HarnessParams params;
    params.instance.T = 8;
    params.instance.dt = 3.0;
    params.max_iters = 10;
    const auto a = run_scaling({"parabolic", "parabolic-full"}, {1, 2}, 2, 1, 3, params);
    const auto b = run_scaling({"parabolic", "parabolic-full"}, {1, 2}, 2, 1, 3, params);
    // Timing columns differ run to run; the structural columns must not.
    auto strip_times = [](const std::string& csv) {
        std::string out;
        size_t pos = 0;
        bool header = true;
        while (pos < csv.size()) {
            size_t eol = csv.find('\n', pos);
            if (eol == std::string::npos) eol = csv.size();
            const std::string line = csv.substr(pos, eol - pos);
            if (header) {
                out += line;
                header = false;
            } else {
                // keep robots,dimension,variant and converged_fraction
                std::vector<std::string> cells;
                size_t c = 0;
                while (c < line.size()) {
                    size_t comma = line.find(',', c);
                    if (comma == std::string::npos) comma = line.size();
                    cells.push_back(line.substr(c, comma - c));
                    c = comma + 1;
                }
                out += cells[0] + "," + cells[1] + "," + cells[2] + "," + cells[5];
            }
            out += "\n";
            pos = eol + 1;
        }
        return out;
    };
    CHECK(strip_times(a.csv) == strip_times(b.csv));
    CHECK(a.records.size() == 4);
}

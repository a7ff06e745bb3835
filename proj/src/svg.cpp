#include "mrmp/svg.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <fstream>

#include "mrmp/scenario_io.hpp"

namespace mrmp {

namespace {

constexpr int kPanel = 800;
constexpr double kMargin = 30.0;

const char* kPalette[] = {"#1f77b4", "#9467bd", "#8c564b", "#e377c2",
                          "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e"};

struct Viewport {
    double min_x, min_y, span;
    int offset_x;

    double sx(double x) const { return offset_x + kMargin + (x - min_x) / span * (kPanel - 2 * kMargin); }
    double sy(double y) const { return kPanel - kMargin - (y - min_y) / span * (kPanel - 2 * kMargin); }
    double scale(double r) const { return r / span * (kPanel - 2 * kMargin); }
};

void append(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    out += buf;
}

}  // namespace

std::string render_svg(const ProblemInstance& instance, const Solution& solution) {
    const int n = instance.n;
    if (n > 3) throw IoError("plot: dimension > 3 not supported");

    // Axis pairs per panel: 2D (and 1D, with a zero vertical axis) use one
    // panel; 3D uses three orthographic projections.
    std::vector<std::pair<int, int>> panels;
    if (n == 3)
        panels = {{0, 1}, {0, 2}, {1, 2}};
    else
        panels = {{0, n >= 2 ? 1 : -1}};

    auto coord = [&](const Vec& state, int axis) { return axis < 0 ? 0.0 : state(axis); };

    // Shared bounds across panels: every position of every entity at every
    // step, inflated by the largest radius.
    double lo = 1e300, hi = -1e300, rmax = 0.0;
    auto absorb = [&](const Vec& state) {
        for (int k = 0; k < n; ++k) {
            lo = std::min(lo, state(k));
            hi = std::max(hi, state(k));
        }
    };
    for (const auto& robot : instance.robots) {
        absorb(robot.x_init);
        absorb(robot.x_goal);
        rmax = std::max(rmax, robot.radius);
    }
    for (const auto& obstacle : instance.obstacles) {
        for (const auto& x : obstacle.states) absorb(x);
        rmax = std::max(rmax, obstacle.radius);
    }
    for (const auto& [id, xs] : solution.states)
        for (const auto& x : xs) absorb(x);
    if (lo > hi) {
        lo = 0.0;
        hi = 1.0;
    }
    lo -= rmax;
    hi += rmax;
    const double pad = 0.05 * std::max(hi - lo, 1e-9);
    Viewport base{lo - pad, lo - pad, std::max(hi - lo + 2 * pad, 1e-9), 0};

    std::string svg;
    const int width = kPanel * static_cast<int>(panels.size());
    append(svg,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
           "viewBox=\"0 0 %d %d\">\n",
           width, kPanel, width, kPanel);
    append(svg, "<rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\"/>\n", width,
           kPanel);

    for (size_t p = 0; p < panels.size(); ++p) {
        Viewport vp = base;
        vp.offset_x = static_cast<int>(p) * kPanel;
        const auto [ax, ay] = panels[p];

        append(svg,
               "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" "
               "stroke=\"black\" stroke-width=\"1.5\"/>\n",
               vp.offset_x + kMargin, kMargin, kPanel - 2 * kMargin, kPanel - 2 * kMargin);

        for (const auto& obstacle : instance.obstacles) {
            const Vec& x = obstacle.states.front();
            append(svg, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"red\"/>\n",
                   vp.sx(coord(x, ax)), vp.sy(coord(x, ay)), vp.scale(obstacle.radius));
        }
        int color_idx = 0;
        for (const auto& robot : instance.robots) {
            const auto it = solution.states.find(robot.id);
            if (it != solution.states.end() && !it->second.empty()) {
                append(svg, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"",
                       kPalette[color_idx % 8]);
                for (const auto& x : it->second)
                    append(svg, "%.3f,%.3f ", vp.sx(coord(x, ax)), vp.sy(coord(x, ay)));
                svg += "\"/>\n";
            }
            append(svg, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"blue\"/>\n",
                   vp.sx(coord(robot.x_init, ax)), vp.sy(coord(robot.x_init, ay)),
                   vp.scale(robot.radius));
            append(svg, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"green\"/>\n",
                   vp.sx(coord(robot.x_goal, ax)), vp.sy(coord(robot.x_goal, ay)),
                   vp.scale(robot.radius));
            ++color_idx;
        }
    }
    svg += "</svg>\n";
    return svg;
}

void save_svg(const ProblemInstance& instance, const Solution& solution,
              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << render_svg(instance, solution);
}

}  // namespace mrmp

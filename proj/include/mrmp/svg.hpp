#pragma once

#include <string>

#include "mrmp/types.hpp"

namespace mrmp {

// Deterministic SVG rendering: fixed 800x800 canvas per panel, obstacles as
// red filled circles, robot starts blue, goals green, one polyline per robot
// through the position sequence. 3D scenes emit three orthographic panels
// (xy, xz, yz) side by side. Identical inputs produce identical bytes.
std::string render_svg(const ProblemInstance& instance, const Solution& solution);
void save_svg(const ProblemInstance& instance, const Solution& solution,
              const std::string& path);

}  // namespace mrmp

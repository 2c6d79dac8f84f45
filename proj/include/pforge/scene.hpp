#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pforge/pathkit.hpp"
#include "pforge/penalty_builder.hpp"

namespace pforge {

struct SceneOptions {
    int grid = 256;      // marching-squares sampling resolution (display only)
    int size_px = 720;
    double pad = 0.15;   // view padding as a fraction of the geometry's extent
    std::vector<double> iso_levels;  // empty = pick midlevels between shells
};

// Level-set segments of a scalar field over [lo, hi]^2 via marching squares.
std::vector<std::array<Vec2, 2>> iso_segments(const std::function<double(const Vec2&)>& field,
                                              double level, const Vec2& lo, const Vec2& hi,
                                              int grid);

// Deterministic SVG: penalty iso-lines, shell outlines, the search path, the anchor.
std::string render_scene(const PenaltyModel& model, const SearchPath& path,
                         const SceneOptions& opt = {});

}  // namespace pforge

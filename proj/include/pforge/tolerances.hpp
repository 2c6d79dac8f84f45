#pragma once

namespace pforge {

// Every geometric epsilon lives here so the numeric contract is in one place.
struct GeomTol {
    double collinear = 1e-12;    // cross-product threshold for dropping hull points
    double containment = 1e-9;   // slack for point-in-body membership tests
};

inline const GeomTol& geom_tol() {
    static const GeomTol t{};
    return t;
}

// Pipeline-level tolerances; the CLI exposes the interesting ones as flags.
struct PipelineTol {
    double group = 0.0;            // |f_i - f_j| merge threshold for path groups
    double normal_angle = 1e-8;    // shared-hyperplane normal agreement (radians)
    double anchor_offset = 1e-8;   // shared-hyperplane offset agreement, scaled by 1+|x|
    double tangency = 1e-6;        // shell-boundary residual at path points
    double verify = 1e-2;          // argmin recovery distance
};

}  // namespace pforge

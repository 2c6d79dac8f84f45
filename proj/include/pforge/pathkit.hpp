#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pforge/convex_core.hpp"
#include "pforge/geometry2d.hpp"

namespace pforge {

struct SearchPath {
    std::vector<Vec> points;
    std::vector<double> f_values;
    std::vector<Vec> subgradients;
    std::string source;  // "gradient_descent", "ingested", "discretized", ...

    int dim() const { return points.empty() ? 0 : int(points[0].size()); }
    size_t size() const { return points.size(); }
};

// Consecutive runs of (tol-)equal f-values; group means must strictly decrease.
struct PathGroups {
    std::vector<std::vector<int>> groups;  // point indices, path order
    std::vector<double> means;
};

struct CondIViolation {
    int i = 0;  // higher-f point
    int j = 0;  // lower-f point whose halfspace is violated
    double margin = 0.0;
};

struct CondIIResidual {
    int group = 0;
    double max_angle = 0.0;   // radians between member normals
    double max_offset = 0.0;  // anchor-to-hyperplane distance, scaled
    bool mixed_degenerate = false;
    bool ok = true;
};

struct InfeasibilityCertificate {
    int i = 0;
    int j = 0;  // the two most conflicting halfspaces
    double joint_radius = 0.0;
};

struct CondIIIResult {
    bool feasible = false;
    Vec witness;
    double radius = 0.0;
    std::optional<InfeasibilityCertificate> certificate;
};

struct AdmissibilityReport {
    bool admissible = false;
    std::string reason;
    std::vector<CondIViolation> cond_i;
    std::vector<CondIIResidual> cond_ii;
    CondIIIResult cond_iii;
};

struct UltimateRegion {
    ConvexPolygon polygon;
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

// Plain gradient descent; the path keeps x0 plus one point per step.
// Throws DivergenceError when an iterate leaves the safety box.
SearchPath run_gradient_descent(const SubgradientOracle& f, const Vec& x0, double step, int iters,
                                double box_half_width = 1e6);

// Attach f-values and subgradients to raw points. Duplicates are kept.
SearchPath ingest_path(const std::vector<Vec>& points, const SubgradientOracle& f,
                       const std::string& source = "ingested");

// Merge consecutive points whose f differs by <= tol; throws GroupingError when the
// group means do not strictly decrease.
PathGroups group_by_value(const SearchPath& path, double tol);

// Axis-aligned square of half-width 10*(1 + max|x_i|) centered at the path centroid.
ConvexPolygon default_bbox(const SearchPath& path);

// Largest-ball LP: maximize r with <u_k, y> - b_k >= r over the given unit rows plus the
// box |y - box_center|_inf <= half_width. Candidates come from active-set enumeration;
// ties are averaged. Returns feasible=false (plus the worst pair) when the region is empty.
CondIIIResult chebyshev_feasibility(const std::vector<Halfspace>& halfspaces,
                                    const Vec& box_center, double half_width);

AdmissibilityReport check_admissibility(const SearchPath& path, const PathGroups& groups);

// Clipped intersection of the path's halfspaces with the box, plus its Chebyshev data.
UltimateRegion ultimate_region(const SearchPath& path, const ConvexPolygon& bbox);

}  // namespace pforge

#pragma once

#include <optional>
#include <vector>

#include "pforge/geometry2d.hpp"
#include "pforge/pathkit.hpp"

namespace pforge {

// Explicit convex penalty: gauge of the innermost shell, frustum laterals between
// consecutive shells, and a conic extension past the outermost one.
struct PenaltyModel {
    Vec2 anchor = Vec2::Zero();
    double anchor_level = 0.0;  // gauge value at the anchor; scaffolding, always 0 here
    std::vector<LeveledBody> shells;
    double outer_apex_level = 0.0;
};

struct TangencyCertificate {
    int point = 0;
    int shell = 0;
    double boundary_dist = 0.0;   // |x_i - bdry K_shell|
    double normal_residual = 0.0; // angle from g_i to the boundary normal cone at x_i
    bool joint_minimizer = false; // zero-subgradient point placed interior instead
};

struct LambdaSchedule {
    enum class Method { ratio, line_search, joint_minimizer };
    std::vector<double> lambdas;
    std::vector<Method> methods;
};

struct BuildResult {
    PenaltyModel model;
    std::vector<TangencyCertificate> certificates;
};

// Anchor and clearance from an admissible report: the Chebyshev witness and
// min(radius/2, 1).
std::pair<Vec2, double> choose_anchor(const AdmissibilityReport& report);

// Hull of one group: tangent disks at the group's first and last points (radius set by
// the slack against the later halfspaces, capped at fallback_radius and halved for
// safety margin) plus the intermediate points. A zero-subgradient group instead gets
// disks centered at its points (no tangency to respect).
ConvexPolygon build_group_hull(const std::vector<int>& group, const SearchPath& path,
                               const std::vector<Halfspace>& later_halfspaces,
                               double fallback_radius, int disk_k = 32, int arc_k = 8);

// Nested shells K_0 subset int K_1 subset ... : K_0 = hull(ball(a, eps), C_0) and
// K_{j+1} = hull(offset(K_j, d_j/2), C_{j+1}) with d_j the clearance of K_j against the
// remaining halfspaces. Verifies strict nesting and tangency at every path point.
BuildResult build_shells(const SearchPath& path, const PathGroups& groups, const Vec2& a,
                         double eps, int disk_k = 32, int arc_k = 8);

// Boundary levels: c_0 = 1; each step drops an apex below the running steepness bound,
// scales by the gauge ratio of the next shell and interpolates. Fills outer_apex_level.
void assign_levels(PenaltyModel& model);

// Fast repeated evaluation of one frozen model.
class PenaltyEvaluator {
  public:
    explicit PenaltyEvaluator(const PenaltyModel& model);
    double operator()(const Vec2& x) const;
    const PenaltyModel& model() const { return model_; }

  private:
    PenaltyModel model_;
    std::vector<FrustumSurface> rings_;  // one per consecutive shell pair
};

double eval_penalty(const PenaltyModel& model, const Vec2& x);

// Per-point tuners: lambda_i = |g_i| / (one-sided slope of the penalty just outside the
// shell through x_i), cross-checked by a line search over candidate lambdas that picks
// whichever recovers x_i best through a reduced minimization oracle.
LambdaSchedule extract_lambdas(const PenaltyModel& model, const SearchPath& path,
                               const PathGroups& groups, const SubgradientOracle& f);

// choose_anchor + build_shells + assign_levels in one call.
BuildResult build_penalty(const SearchPath& path, const PathGroups& groups,
                          const AdmissibilityReport& report, int disk_k = 32, int arc_k = 8);

}  // namespace pforge

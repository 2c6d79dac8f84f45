#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pforge/convex_core.hpp"
#include "pforge/errors.hpp"
#include "pforge/tolerances.hpp"

namespace pforge {

using Vec2 = Eigen::Vector2d;

// Convex polygon, vertices CCW and strictly convex (no collinear triples).
// Results of clipping can collapse; the tag records what is left.
struct ConvexPolygon {
    enum class Tag { empty, point, segment, proper };
    Tag tag = Tag::empty;
    std::vector<Vec2> v;

    bool proper() const { return tag == Tag::proper; }
    // Signed distance from x to the farthest-violated edge line; >= 0 inside, scaled by edge length.
    double min_margin(const Vec2& x) const;
    bool contains(const Vec2& x, double tol = geom_tol().containment) const {
        return proper() && min_margin(x) >= -tol;
    }
    double area() const;
    Vec2 centroid() const;
};

struct Disk {
    Vec2 center;
    double radius = 0.0;
};

struct LeveledBody {
    ConvexPolygon polygon;
    double level = 0.0;
};

struct SteepnessValue {
    double value = 0.0;
    bool finite = true;
};

// Strictly convex hull (Andrew monotone chain); collinear points are dropped.
ConvexPolygon convex_hull(std::vector<Vec2> pts);

// Intersection with a closed halfplane; degenerate halfspaces return poly unchanged.
ConvexPolygon clip(const ConvexPolygon& poly, const Halfspace& h);

// Regular k-gon inscribed in the disk, first vertex at angle `phase` (default 0). k >= 8.
ConvexPolygon disk_polygon(const Disk& d, int k, double phase = 0.0);

// Disk of radius r tangent at x to the hyperplane of (x, g), lying inside H+(x, g).
Disk tangent_disk(const Vec2& x, const Vec2& g, double r);

// Inner polygonal approximation of { y : dist(y, poly) <= r }.  Edge offsets are exact;
// every vertex is rounded with an inscribed arc fan sampled at angular step (pi/2)/arc_k.
ConvexPolygon offset_body(const ConvexPolygon& poly, double r, int arc_k);

// Minkowski gauge of poly with respect to interior anchor a, evaluated anywhere:
// the unique t >= 0 with x on the boundary of a + t*(poly - a).
double gauge(const ConvexPolygon& poly, const Vec2& a, const Vec2& x);

// x in (1-s)*D1 (+) s*D2, computed as the hull of pairwise-scaled vertex sums.
bool minkowski_blend_membership(const ConvexPolygon& d1, const ConvexPolygon& d2, double s,
                                const Vec2& x);

// Support-table form of the blend membership predicate; shared by frustum_eval and the
// penalty evaluator so repeated queries against one shell pair stay cheap.
struct FrustumSurface {
    std::vector<Vec2> normals;     // outward unit edge normals of both bodies
    std::vector<double> sup_lo;    // support of bottom polygon along each normal
    std::vector<double> sup_hi;    // support of top polygon along each normal
    double level_lo = 0.0;
    double level_hi = 0.0;

    FrustumSurface(const LeveledBody& bottom, const LeveledBody& top);
    bool member(double s, const Vec2& x) const;
    // Lateral height at x: bisection on s over the nested blend sections.
    double eval(const Vec2& x) const;
    // Same height by solving each support constraint for s directly; one pass over the
    // normals instead of sixty, so the hot path in the penalty evaluator uses this.
    double eval_direct(const Vec2& x) const;
};

// Height of the lateral surface of the frustum conv((bottom, level_lo), (top, level_hi)) at x.
// Requires bottom strictly inside top and x in top \ int bottom.
double frustum_eval(const LeveledBody& bottom, const LeveledBody& top, const Vec2& x);

// Lateral steepness bound of the truncated cone with apex (apex, apex_level) over base:
// |apex_level - base.level| / dist(apex, boundary of base.polygon).
SteepnessValue steepness_bound(const Vec2& apex, double apex_level, const LeveledBody& base);

// Sampled check of the cone-nesting fact behind path ordering: with c = (1-theta)a + theta*b
// and 0 < delta < theta < 1, b + cone(b - B(a, delta)) lies inside c + cone(c - B(a, delta)).
bool cone_inclusion_check(const Vec2& a, const Vec2& b, double theta, double delta, int samples);

// Helpers shared across modules.
double dist_to_boundary(const ConvexPolygon& poly, const Vec2& x);  // unsigned, min over edges
double max_vertex_dist(const ConvexPolygon& poly, const Vec2& x);
Vec2 outward_edge_normal(const Vec2& from, const Vec2& to);

}  // namespace pforge

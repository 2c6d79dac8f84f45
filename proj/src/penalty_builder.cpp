#include "pforge/penalty_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pforge/errors.hpp"
#include "pforge/tolerances.hpp"
#include "pforge/verifier.hpp"

namespace pforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 to2(const Vec& x) { return Vec2(x(0), x(1)); }

bool group_is_degenerate(const std::vector<int>& group, const SearchPath& path) {
    for (int i : group) {
        if (path.subgradients[static_cast<std::size_t>(i)].norm() != 0.0) return false;
    }
    return true;
}

// Angular residual between direction u and the outward normal cone of `poly` at the
// boundary point x. 0 when u lies inside the cone.
double normal_cone_residual(const ConvexPolygon& poly, const Vec2& x, const Vec2& u) {
    const auto& v = poly.v;
    const int m = static_cast<int>(v.size());
    const double tol = 1e-7;
    std::vector<Vec2> normals;
    for (int e = 0; e < m; ++e) {
        const Vec2& p = v[static_cast<std::size_t>(e)];
        const Vec2& q = v[static_cast<std::size_t>((e + 1) % m)];
        Vec2 d = q - p;
        double len2 = d.squaredNorm();
        if (len2 == 0.0) continue;
        double t = std::clamp((x - p).dot(d) / len2, 0.0, 1.0);
        if ((x - (p + t * d)).norm() <= tol) normals.push_back(outward_edge_normal(p, q));
    }
    if (normals.empty()) return kPi;  // x not on the boundary at all
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& n : normals) {
        double c = std::clamp(n.dot(u), -1.0, 1.0);
        best = std::min(best, std::acos(c));
    }
    if (normals.size() >= 2) {
        // Vertex case: u inside the spanned cone counts as exact even if not parallel
        // to either edge normal.
        for (std::size_t i = 0; i + 1 < normals.size(); ++i) {
            for (std::size_t j = i + 1; j < normals.size(); ++j) {
                const Vec2& n1 = normals[i];
                const Vec2& n2 = normals[j];
                double det = n1.x() * n2.y() - n1.y() * n2.x();
                if (std::abs(det) < 1e-12) continue;
                double a1 = (u.x() * n2.y() - u.y() * n2.x()) / det;
                double a2 = (n1.x() * u.y() - n1.y() * u.x()) / det;
                if (a1 >= -1e-12 && a2 >= -1e-12) return 0.0;
            }
        }
    }
    return best;
}

double support(const ConvexPolygon& poly, const Vec2& u) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : poly.v) best = std::max(best, u.dot(v));
    return best;
}

}  // namespace

std::pair<Vec2, double> choose_anchor(const AdmissibilityReport& report) {
    if (!report.admissible) throw BuildError("cannot build a penalty for an inadmissible path");
    if (!report.cond_iii.feasible || report.cond_iii.witness.size() != 2)
        throw BuildError("admissible report lacks a planar interior witness");
    Vec2 a = to2(report.cond_iii.witness);
    double eps = std::min(report.cond_iii.radius / 2.0, 1.0);
    if (!(eps > 0.0)) throw BuildError("interior witness has no clearance");
    return {a, eps};
}

ConvexPolygon build_group_hull(const std::vector<int>& group, const SearchPath& path,
                               const std::vector<Halfspace>& later_halfspaces,
                               double fallback_radius, int disk_k, int arc_k) {
    (void)arc_k;
    if (group.empty()) throw BuildError("empty level group");
    std::vector<Vec2> pts;
    const bool degenerate = group_is_degenerate(group, path);

    auto disk_radius_at = [&](const Vec2& x, const Vec2& u_inward) {
        // Largest ball tangent at x (inward along u) that stays weakly inside every
        // later halfspace, then halved so the clearance is strict.
        double r = fallback_radius;
        for (const Halfspace& h : later_halfspaces) {
            if (h.degenerate) continue;
            Vec2 n = to2(h.normal).normalized();
            Vec2 anchor = to2(h.anchor);
            double slack = n.dot(x - anchor);
            double denom = 1.0 - n.dot(u_inward);
            if (denom <= 1e-12) continue;  // ball moves parallel or deeper; no limit
            if (slack <= 0.0)
                throw BuildError("path point has no clearance against a later halfspace");
            r = std::min(r, 0.5 * slack / denom);
        }
        if (!(r > 0.0)) throw BuildError("tangent ball radius collapsed to zero");
        return r;
    };

    auto add_tangent_disk = [&](int idx) {
        const Vec2 x = to2(path.points[static_cast<std::size_t>(idx)]);
        const Vec& g = path.subgradients[static_cast<std::size_t>(idx)];
        Vec2 u = to2(g).normalized();  // inward: the ball sits on the far side of the plane
        double r = disk_radius_at(x, u);
        ConvexPolygon disk = disk_polygon(Disk{x + r * u, r}, disk_k,
                                          std::atan2(-u.y(), -u.x()));
        // Pin the tangency point as an exact vertex.
        if (!disk.v.empty()) disk.v[0] = x;
        pts.insert(pts.end(), disk.v.begin(), disk.v.end());
    };

    if (degenerate) {
        double r = fallback_radius;
        for (int i : group) {
            ConvexPolygon disk =
                disk_polygon(Disk{to2(path.points[static_cast<std::size_t>(i)]), r}, disk_k);
            pts.insert(pts.end(), disk.v.begin(), disk.v.end());
        }
    } else {
        add_tangent_disk(group.front());
        if (group.size() > 1) add_tangent_disk(group.back());
        for (std::size_t k = 1; k + 1 < group.size(); ++k)
            pts.push_back(to2(path.points[static_cast<std::size_t>(group[k])]));
    }
    ConvexPolygon hull = convex_hull(pts);
    if (!hull.proper()) throw BuildError("level-set core degenerated to a lower-dimensional hull");
    return hull;
}

BuildResult build_shells(const SearchPath& path, const PathGroups& groups, const Vec2& a,
                         double eps, int disk_k, int arc_k) {
    if (path.dim() != 2) throw BuildError("shell construction is planar");
    const int G = static_cast<int>(groups.groups.size());
    if (G == 0) throw BuildError("no level groups");

    std::vector<Halfspace> hs(path.size());
    for (int i = 0; i < static_cast<int>(path.size()); ++i)
        hs[static_cast<std::size_t>(i)] =
            halfspace_plus(path.points[static_cast<std::size_t>(i)],
                           path.subgradients[static_cast<std::size_t>(i)]);

    auto later = [&](int j) {
        std::vector<Halfspace> out;
        for (int l = j + 1; l < G; ++l)
            for (int i : groups.groups[static_cast<std::size_t>(l)])
                if (!hs[static_cast<std::size_t>(i)].degenerate)
                    out.push_back(hs[static_cast<std::size_t>(i)]);
        return out;
    };

    BuildResult result;
    PenaltyModel& model = result.model;
    model.anchor = a;

    // Innermost shell: a clearance disk around the anchor joined with the first core.
    ConvexPolygon core0 = build_group_hull(groups.groups[0], path, later(0), eps, disk_k, arc_k);
    std::vector<Vec2> seed = disk_polygon(Disk{a, eps}, disk_k).v;
    seed.insert(seed.end(), core0.v.begin(), core0.v.end());
    ConvexPolygon K = convex_hull(seed);
    if (!K.proper() || !(K.min_margin(a) > 0.0))
        throw BuildError("anchor is not interior to the innermost shell");
    model.shells.push_back(LeveledBody{K, 0.0});

    for (int j = 1; j < G; ++j) {
        std::vector<Halfspace> rest = later(j - 1);
        double d = eps;
        if (!rest.empty()) {
            d = std::numeric_limits<double>::infinity();
            for (const Vec2& v : K.v)
                for (const Halfspace& h : rest) {
                    Vec hv(2);
                    hv << v.x(), v.y();
                    d = std::min(d, signed_margin(h, hv));
                }
            if (!(d > 0.0)) throw BuildError("shell crossed a later supporting halfspace");
        }
        ConvexPolygon expanded = offset_body(K, d / 2.0, arc_k);
        ConvexPolygon core = build_group_hull(groups.groups[static_cast<std::size_t>(j)], path,
                                              later(j), eps, disk_k, arc_k);
        std::vector<Vec2> merged = expanded.v;
        merged.insert(merged.end(), core.v.begin(), core.v.end());
        ConvexPolygon next = convex_hull(merged);
        if (!next.proper()) throw BuildError("shell hull degenerated");
        for (const Vec2& v : K.v)
            if (!(next.min_margin(v) > 1e-9))
                throw BuildError("shells failed to nest strictly");
        model.shells.push_back(LeveledBody{next, 0.0});
        K = next;
    }

    // Certify how each path point meets its shell.
    const double tang_tol = PipelineTol{}.tangency;
    for (int j = 0; j < G; ++j) {
        const ConvexPolygon& shell = model.shells[static_cast<std::size_t>(j)].polygon;
        for (int i : groups.groups[static_cast<std::size_t>(j)]) {
            const Vec2 x = to2(path.points[static_cast<std::size_t>(i)]);
            const Vec& g = path.subgradients[static_cast<std::size_t>(i)];
            TangencyCertificate cert;
            cert.point = i;
            cert.shell = j;
            if (g.norm() == 0.0) {
                cert.joint_minimizer = true;
                cert.boundary_dist = 0.0;
                cert.normal_residual = 0.0;
                if (!(shell.min_margin(x) > -tang_tol))
                    throw BuildError("stationary path point escaped its shell");
            } else {
                cert.boundary_dist = std::abs(shell.min_margin(x));
                // The subgradient points uphill, toward the anchor; the shell's outward
                // normal at the touch point is its negation.
                cert.normal_residual = normal_cone_residual(shell, x, -to2(g).normalized());
                if (cert.boundary_dist > tang_tol)
                    throw BuildError("path point lost tangency with its shell");
                if (cert.normal_residual > 1e-6)
                    throw BuildError("subgradient left the shell's normal cone");
            }
            result.certificates.push_back(cert);
        }
    }
    return result;
}

void assign_levels(PenaltyModel& model) {
    if (model.shells.empty()) throw BuildError("no shells to level");
    const Vec2& a = model.anchor;
    model.anchor_level = 0.0;
    model.shells[0].level = 1.0;

    double d0 = dist_to_boundary(model.shells[0].polygon, a);
    if (!(d0 > 0.0)) throw BuildError("anchor clearance vanished");
    double steep = model.shells[0].level / d0;  // slope bound of the inner gauge cone

    for (std::size_t j = 1; j < model.shells.size(); ++j) {
        const ConvexPolygon& inner = model.shells[j - 1].polygon;
        const ConvexPolygon& outer = model.shells[j].polygon;
        const double c_in = model.shells[j - 1].level;
        const double maxd = max_vertex_dist(inner, a);
        const double apex = c_in - (steep + 1.0) * maxd;

        double lam = 0.0;
        for (const Vec2& v : outer.v) lam = std::max(lam, gauge(inner, a, v));
        if (!(lam > 1.0)) throw BuildError("outer shell does not strictly enclose the inner");

        const double c_out = (1.0 - lam) * apex + lam * c_in;
        if (!(c_out > c_in)) throw BuildError("shell levels failed to increase");
        model.shells[j].level = c_out;

        // Slope of the new ring is bounded by rise over the tightest support gap.
        double gap = std::numeric_limits<double>::infinity();
        auto scan = [&](const ConvexPolygon& poly) {
            const int m = static_cast<int>(poly.v.size());
            for (int e = 0; e < m; ++e) {
                Vec2 n = outward_edge_normal(poly.v[static_cast<std::size_t>(e)],
                                             poly.v[static_cast<std::size_t>((e + 1) % m)]);
                gap = std::min(gap, support(outer, n) - support(inner, n));
            }
        };
        scan(inner);
        scan(outer);
        if (!(gap > 0.0)) throw BuildError("nested shells have no support gap");
        steep = std::max(steep, (c_out - c_in) / gap);
    }

    const LeveledBody& last = model.shells.back();
    model.outer_apex_level = 1.0 - (steep + 1.0) * max_vertex_dist(last.polygon, a);
    if (!(model.outer_apex_level < last.level))
        throw BuildError("exterior apex failed to sit below the outer level");
}

PenaltyEvaluator::PenaltyEvaluator(const PenaltyModel& model) : model_(model) {
    if (model_.shells.empty()) throw BuildError("penalty model has no shells");
    if (!(model_.shells[0].polygon.min_margin(model_.anchor) > 0.0))
        throw BuildError("anchor must be interior to the innermost shell");
    for (std::size_t j = 1; j < model_.shells.size(); ++j) {
        if (!(model_.shells[j].level > model_.shells[j - 1].level))
            throw BuildError("shell levels must strictly increase");
        rings_.emplace_back(model_.shells[j - 1], model_.shells[j]);
    }
    if (!(model_.outer_apex_level < model_.shells.back().level))
        throw BuildError("exterior apex must lie below the outer level");
}

double PenaltyEvaluator::operator()(const Vec2& x) const {
    const Vec2& a = model_.anchor;
    double g0 = gauge(model_.shells[0].polygon, a, x);
    if (g0 <= 1.0) return g0 * model_.shells[0].level;
    const std::size_t k = model_.shells.size();
    double t = gauge(model_.shells[k - 1].polygon, a, x);
    if (t > 1.0)
        return model_.outer_apex_level + t * (model_.shells[k - 1].level - model_.outer_apex_level);
    // Shells nest strictly, so containment is monotone in the index: binary-search
    // the first shell whose gauge drops to one instead of walking every shell.
    std::size_t lo = 0, hi = k - 1;  // shells[lo] excludes x, shells[hi] contains it
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (gauge(model_.shells[mid].polygon, a, x) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return rings_[hi - 1].eval_direct(x);
}

double eval_penalty(const PenaltyModel& model, const Vec2& x) {
    return PenaltyEvaluator(model)(x);
}

LambdaSchedule extract_lambdas(const PenaltyModel& model, const SearchPath& path,
                               const PathGroups& groups, const SubgradientOracle& f) {
    PenaltyEvaluator psi(model);
    const Vec2& a = model.anchor;
    LambdaSchedule out;
    out.lambdas.assign(path.size(), 0.0);
    out.methods.assign(path.size(), LambdaSchedule::Method::ratio);

    // Local recovery quality of f + lambda*psi started at the path point itself.
    auto recovery_dist = [&](int i, double lambda) {
        const Vec2 x = to2(path.points[static_cast<std::size_t>(i)]);
        Objective2d obj = [&](const Vec2& y) {
            Vec yv(2);
            yv << y.x(), y.y();
            return f.eval(yv) + lambda * psi(y);
        };
        double scale = 0.05 * (1.0 + x.norm());
        MinimizeResult r = nelder_mead(obj, x, scale, 1e-9, 400);
        return (r.argmin - x).norm();
    };

    for (std::size_t j = 0; j < groups.groups.size(); ++j) {
        for (int i : groups.groups[j]) {
            const Vec2 x = to2(path.points[static_cast<std::size_t>(i)]);
            const Vec& g = path.subgradients[static_cast<std::size_t>(i)];
            const auto idx = static_cast<std::size_t>(i);
            if (g.norm() == 0.0) {
                if ((x - a).norm() <= 1e-7 * (1.0 + a.norm())) {
                    // Stationary point at the penalty's own minimum: any weight works.
                    out.lambdas[idx] = 1.0;
                    out.methods[idx] = LambdaSchedule::Method::joint_minimizer;
                } else {
                    // A stationary point away from the anchor is never an exact joint
                    // argmin (the penalty pulls uphill), but the replay error shrinks
                    // linearly in lambda.  Descend by decades until the recovery
                    // distance stops improving or hits the oracle's resolution; the
                    // built surface can be steep enough to need very small weights.
                    double best_l = 1.0, best_d = std::numeric_limits<double>::infinity();
                    const double floor_d = 1e-8 * (1.0 + x.norm());
                    int stale = 0;
                    for (int e = 0; e >= -300 && stale < 3; --e) {
                        double l = std::pow(10.0, e);
                        double d = recovery_dist(i, l);
                        if (d < 0.9 * best_d) {
                            best_d = d;
                            best_l = l;
                            stale = 0;
                        } else {
                            ++stale;
                        }
                        if (best_d <= floor_d) break;
                    }
                    out.lambdas[idx] = best_l;
                    out.methods[idx] = LambdaSchedule::Method::line_search;
                }
                continue;
            }

            // One-sided slope of psi along the outward direction (away from the anchor).
            Vec2 dir = -to2(g).normalized();
            double h = 1e-5 * (1.0 + x.norm());
            double slope = (psi(x + h * dir) - psi(x)) / h;
            if (!(slope > 0.0)) throw BuildError("penalty is flat across a path point");
            double ratio = g.norm() / slope;

            // Fall back to a bracket search only when the ratio weight misses by a
            // real margin; ties go to the ratio (the argmin is flat in lambda near
            // a kink, so sub-noise improvements mean nothing).
            double best_l = ratio, best_d = recovery_dist(i, ratio);
            const double noise = 1e-7 * (1.0 + x.norm());
            if (best_d > noise) {
                for (int e = -3; e <= 3; ++e) {
                    if (e == 0) continue;
                    double l = ratio * std::pow(2.0, e);
                    double d = recovery_dist(i, l);
                    if (d < 0.5 * best_d) {
                        best_d = d;
                        best_l = l;
                    }
                }
            }
            if (std::abs(best_l - ratio) > 0.05 * ratio) {
                out.lambdas[idx] = best_l;
                out.methods[idx] = LambdaSchedule::Method::line_search;
            } else {
                out.lambdas[idx] = ratio;
                out.methods[idx] = LambdaSchedule::Method::ratio;
            }
        }
    }
    return out;
}

BuildResult build_penalty(const SearchPath& path, const PathGroups& groups,
                          const AdmissibilityReport& report, int disk_k, int arc_k) {
    auto [a, eps] = choose_anchor(report);
    BuildResult result = build_shells(path, groups, a, eps, disk_k, arc_k);
    assign_levels(result.model);
    PenaltyEvaluator check(result.model);  // validates the finished model
    (void)check;
    return result;
}

}  // namespace pforge

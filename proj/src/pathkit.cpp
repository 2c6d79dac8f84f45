#include "pforge/pathkit.hpp"

#include <algorithm>
#include <cmath>

namespace pforge {

SearchPath run_gradient_descent(const SubgradientOracle& f, const Vec& x0, double step, int iters,
                                double box_half_width) {
    if (!(step > 0.0)) throw ConfigError("gradient descent: step must be positive");
    if (iters < 0) throw ConfigError("gradient descent: iters must be non-negative");
    SearchPath p;
    p.source = "gradient_descent";
    Vec x = x0;
    for (int t = 0; t <= iters; ++t) {
        if (x.lpNorm<Eigen::Infinity>() > box_half_width)
            throw DivergenceError("gradient descent: iterate escaped the safety box");
        p.points.push_back(x);
        p.f_values.push_back(f.eval(x));
        p.subgradients.push_back(f.subgrad(x));
        if (t < iters) x = x - step * p.subgradients.back();
    }
    return p;
}

SearchPath ingest_path(const std::vector<Vec>& points, const SubgradientOracle& f,
                       const std::string& source) {
    if (points.empty()) throw ConfigError("ingest_path: empty point list");
    SearchPath p;
    p.source = source;
    for (const auto& x : points) {
        if (int(x.size()) != f.dim) throw ConfigError("ingest_path: point dimension mismatch");
        if (!f.in_domain(x)) throw DomainError("ingest_path: point outside the loss domain");
        p.points.push_back(x);
        p.f_values.push_back(f.eval(x));
        p.subgradients.push_back(f.subgrad(x));
    }
    return p;
}

PathGroups group_by_value(const SearchPath& path, double tol) {
    if (tol < 0.0) throw ConfigError("group_by_value: tol must be non-negative");
    if (path.size() == 0) throw ConfigError("group_by_value: empty path");
    PathGroups g;
    double ref = path.f_values[0];
    g.groups.push_back({0});
    for (int i = 1; i < int(path.size()); ++i) {
        if (std::abs(path.f_values[i] - ref) <= tol) {
            g.groups.back().push_back(i);
        } else {
            g.groups.push_back({i});
            ref = path.f_values[i];
        }
    }
    g.means.reserve(g.groups.size());
    for (const auto& grp : g.groups) {
        double m = 0.0;
        for (int i : grp) m += path.f_values[i];
        g.means.push_back(m / double(grp.size()));
    }
    for (size_t k = 1; k < g.means.size(); ++k) {
        if (!(g.means[k] < g.means[k - 1] - tol)) {
            std::vector<int> bad = g.groups[k];
            throw GroupingError("group_by_value: f-values do not strictly decrease", bad);
        }
    }
    return g;
}

ConvexPolygon default_bbox(const SearchPath& path) {
    if (path.dim() != 2) throw GeometryError("default_bbox: path is not planar");
    Vec2 c = Vec2::Zero();
    double maxnorm = 0.0;
    for (const auto& x : path.points) {
        c += Vec2(x[0], x[1]);
        maxnorm = std::max(maxnorm, x.norm());
    }
    c /= double(path.size());
    const double h = 10.0 * (1.0 + maxnorm);
    ConvexPolygon box;
    box.tag = ConvexPolygon::Tag::proper;
    box.v = {Vec2(c.x() - h, c.y() - h), Vec2(c.x() + h, c.y() - h), Vec2(c.x() + h, c.y() + h),
             Vec2(c.x() - h, c.y() + h)};
    return box;
}

namespace {

struct LPRow {
    Vec u;       // unit normal
    double b;    // threshold: margin(y) = <u, y> - b
    int origin;  // halfspace index, or -1 for box rows
};

std::vector<LPRow> halfspace_rows(const std::vector<Halfspace>& halfspaces) {
    std::vector<LPRow> rows;
    for (int i = 0; i < int(halfspaces.size()); ++i) {
        const auto& h = halfspaces[i];
        if (h.degenerate) continue;
        Vec u = h.normal / h.normal.norm();
        rows.push_back({u, u.dot(h.anchor), i});
    }
    return rows;
}

void append_box_rows(std::vector<LPRow>& rows, const Vec& box_center, double half_width) {
    const int n = int(box_center.size());
    for (int k = 0; k < n; ++k) {
        Vec e = Vec::Zero(n);
        e[k] = 1.0;
        rows.push_back({e, box_center[k] - half_width, -1});
        rows.push_back({-e, -(box_center[k] + half_width), -1});
    }
}

void append_polygon_rows(std::vector<LPRow>& rows, const ConvexPolygon& box) {
    const size_t n = box.v.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2 out = outward_edge_normal(box.v[i], box.v[(i + 1) % n]);
        Vec u(2);
        u << -out.x(), -out.y();  // inward
        Vec p(2);
        p << box.v[i].x(), box.v[i].y();
        rows.push_back({u, u.dot(p), -1});
    }
}

// max r s.t. <u_k, y> - b_k >= r for the given subset of rows, by enumerating
// active sets of size n+1 and keeping feasible candidates.
struct LPSolution {
    bool solved = false;
    Vec y;
    double r = -std::numeric_limits<double>::infinity();
};

LPSolution solve_maxmin(const std::vector<LPRow>& rows, int n) {
    const int m = int(rows.size());
    const int k = n + 1;
    LPSolution best;
    std::vector<Vec> optima;

    std::vector<int> idx(k);
    // iterate over all k-subsets of rows
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            Mat Asys(k, k);
            Vec rhs(k);
            for (int r = 0; r < k; ++r) {
                Asys.row(r).head(n) = rows[idx[r]].u.transpose();
                Asys(r, n) = -1.0;
                rhs[r] = rows[idx[r]].b;
            }
            Eigen::FullPivLU<Mat> lu(Asys);
            if (!lu.isInvertible()) return;
            const Vec sol = lu.solve(rhs);
            const Vec y = sol.head(n);
            const double r = sol[n];
            for (const auto& row : rows)
                if (row.u.dot(y) - row.b < r - 1e-9 * (1.0 + std::abs(r))) return;  // infeasible
            if (r > best.r + 1e-9 * (1.0 + std::abs(r))) {
                best = {true, y, r};
                optima = {y};
            } else if (best.solved && std::abs(r - best.r) <= 1e-9 * (1.0 + std::abs(best.r))) {
                optima.push_back(y);
            }
            return;
        }
        for (int i = start; i <= m - (k - depth); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);

    if (best.solved && optima.size() > 1) {
        // average the optimal face's candidates; min-margin is concave, so this stays optimal
        Vec mean = Vec::Zero(n);
        for (const auto& y : optima) mean += y;
        mean /= double(optima.size());
        double r = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) r = std::min(r, row.u.dot(mean) - row.b);
        best.y = mean;
        best.r = r;
    }
    return best;
}

// Shared core: max-min-margin over halfspace rows plus a bounding region given as rows.
CondIIIResult chebyshev_over_rows(const std::vector<Halfspace>& halfspaces,
                                  const std::vector<LPRow>& region_rows, int n) {
    CondIIIResult out;
    auto rows = halfspace_rows(halfspaces);
    const size_t n_half = rows.size();
    rows.insert(rows.end(), region_rows.begin(), region_rows.end());
    const auto sol = solve_maxmin(rows, n);
    if (sol.solved && sol.r > 0.0) {
        out.feasible = true;
        out.witness = sol.y;
        out.radius = sol.r;
        return out;
    }

    // Infeasible (or flat): name the pair of halfspaces that conflict the most, judged
    // by the best joint radius each pair can still achieve inside the region.
    InfeasibilityCertificate cert;
    double worst = std::numeric_limits<double>::infinity();
    const auto half_only = std::vector<LPRow>(rows.begin(), rows.begin() + n_half);
    for (size_t a = 0; a < half_only.size(); ++a) {
        for (size_t b = a + 1; b < half_only.size(); ++b) {
            std::vector<LPRow> pair_rows = {half_only[a], half_only[b]};
            pair_rows.insert(pair_rows.end(), region_rows.begin(), region_rows.end());
            const auto pr = solve_maxmin(pair_rows, n);
            const double r = pr.solved ? pr.r : -std::numeric_limits<double>::infinity();
            if (r < worst) {
                worst = r;
                cert.i = half_only[a].origin;
                cert.j = half_only[b].origin;
                cert.joint_radius = r;
            }
        }
    }
    out.feasible = false;
    out.radius = sol.solved ? sol.r : 0.0;
    if (n_half > 0) out.certificate = cert;
    return out;
}

}  // namespace

CondIIIResult chebyshev_feasibility(const std::vector<Halfspace>& halfspaces,
                                    const Vec& box_center, double half_width) {
    std::vector<LPRow> region;
    append_box_rows(region, box_center, half_width);
    return chebyshev_over_rows(halfspaces, region, int(box_center.size()));
}

AdmissibilityReport check_admissibility(const SearchPath& path, const PathGroups& groups) {
    AdmissibilityReport rep;
    const int n = path.dim();
    std::vector<Halfspace> hs;
    hs.reserve(path.size());
    for (size_t i = 0; i < path.size(); ++i)
        hs.push_back(halfspace_plus(path.points[i], path.subgradients[i]));

    // (i) every higher-f point lies strictly inside every lower-f point's halfspace
    for (size_t gi = 0; gi < groups.groups.size(); ++gi) {
        for (size_t gj = gi + 1; gj < groups.groups.size(); ++gj) {
            for (int i : groups.groups[gi]) {
                for (int j : groups.groups[gj]) {
                    if (hs[j].degenerate) continue;  // R^n: nothing to violate
                    const double m = signed_margin(hs[j], path.points[i]);
                    if (m <= 0.0) rep.cond_i.push_back({i, j, m});
                }
            }
        }
    }

    // (ii) members of one group share a hyperplane
    const PipelineTol ptol;
    for (size_t g = 0; g < groups.groups.size(); ++g) {
        const auto& grp = groups.groups[g];
        CondIIResidual res;
        res.group = int(g);
        for (size_t a = 0; a < grp.size(); ++a) {
            for (size_t b = a + 1; b < grp.size(); ++b) {
                const auto& ha = hs[grp[a]];
                const auto& hb = hs[grp[b]];
                if (ha.degenerate != hb.degenerate) {
                    res.mixed_degenerate = true;
                    continue;
                }
                if (ha.degenerate) continue;
                const Vec ua = ha.normal / ha.normal.norm();
                const Vec ub = hb.normal / hb.normal.norm();
                const double cosang = std::clamp(ua.dot(ub), -1.0, 1.0);
                res.max_angle = std::max(res.max_angle, std::acos(cosang));
                const double off_ab =
                    std::abs(ua.dot(hb.anchor - ha.anchor)) / (1.0 + hb.anchor.norm());
                const double off_ba =
                    std::abs(ub.dot(ha.anchor - hb.anchor)) / (1.0 + ha.anchor.norm());
                res.max_offset = std::max({res.max_offset, off_ab, off_ba});
            }
        }
        res.ok = !res.mixed_degenerate && res.max_angle <= ptol.normal_angle &&
                 res.max_offset <= ptol.anchor_offset;
        rep.cond_ii.push_back(res);
    }

    // (iii) the halfspaces share an interior point; witness by the largest inscribed ball
    Vec centroid = Vec::Zero(n);
    double maxnorm = 0.0;
    for (const auto& x : path.points) {
        centroid += x;
        maxnorm = std::max(maxnorm, x.norm());
    }
    centroid /= double(path.size());
    rep.cond_iii = chebyshev_feasibility(hs, centroid, 10.0 * (1.0 + maxnorm));

    const bool ii_ok = std::all_of(rep.cond_ii.begin(), rep.cond_ii.end(),
                                   [](const CondIIResidual& r) { return r.ok; });
    rep.admissible = rep.cond_i.empty() && ii_ok && rep.cond_iii.feasible;
    if (!rep.admissible) {
        rep.reason = !rep.cond_i.empty()       ? "a lower point's halfspace excludes a higher point"
                     : !ii_ok                  ? "a value-tied group does not share a hyperplane"
                     : "the halfspaces have no common interior point";
    }
    return rep;
}

UltimateRegion ultimate_region(const SearchPath& path, const ConvexPolygon& bbox) {
    if (path.dim() != 2) throw GeometryError("ultimate_region: path is not planar");
    if (!bbox.proper()) throw GeometryError("ultimate_region: bbox is not a proper polygon");
    for (const auto& x : path.points)
        if (!bbox.contains(Vec2(x[0], x[1])))
            throw GeometryError("ultimate_region: bbox does not contain the path");

    UltimateRegion region;
    ConvexPolygon poly = bbox;
    std::vector<Halfspace> hs;
    for (size_t i = 0; i < path.size(); ++i) {
        const auto h = halfspace_plus(path.points[i], path.subgradients[i]);
        if (h.degenerate) continue;
        hs.push_back(h);
        poly = clip(poly, h);
    }
    region.polygon = poly;
    if (poly.tag == ConvexPolygon::Tag::empty) return region;

    std::vector<LPRow> region_rows;
    append_polygon_rows(region_rows, bbox);
    const auto cheb = chebyshev_over_rows(hs, region_rows, 2);
    if (cheb.feasible) {
        region.center = Vec2(cheb.witness[0], cheb.witness[1]);
        region.radius = cheb.radius;
    }
    return region;
}

}  // namespace pforge

#include "pforge/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pforge {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool lex_less(const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

}  // namespace

double ConvexPolygon::min_margin(const Vec2& x) const {
    if (!proper()) throw GeometryError("min_margin: polygon is not proper");
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        const double len = (q - p).norm();
        m = std::min(m, cross(p, q, x) / len);  // CCW: positive inside
    }
    return m;
}

double ConvexPolygon::area() const {
    if (!proper()) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        s += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * s;
}

Vec2 ConvexPolygon::centroid() const {
    if (v.empty()) throw GeometryError("centroid: empty polygon");
    Vec2 c = Vec2::Zero();
    for (const auto& p : v) c += p;
    return c / double(v.size());
}

ConvexPolygon convex_hull(std::vector<Vec2> pts) {
    ConvexPolygon out;
    if (pts.empty()) return out;

    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a == b; }),
              pts.end());

    if (pts.size() == 1) {
        out.tag = ConvexPolygon::Tag::point;
        out.v = {pts[0]};
        return out;
    }

    const double eps = geom_tol().collinear;
    auto turn_tol = [&](const Vec2& o, const Vec2& a, const Vec2& b) {
        // relative collinearity: scale the cross product by the edge lengths
        const double scale = std::max(1.0, (a - o).norm() * (b - a).norm());
        return cross(o, a, b) <= eps * scale;
    };

    const size_t n = pts.size();
    std::vector<Vec2> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {  // lower
        while (k >= 2 && turn_tol(h[k - 2], h[k - 1], pts[i])) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
        while (k >= t && turn_tol(h[k - 2], h[k - 1], pts[i])) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);

    if (h.size() == 2) {
        out.tag = ConvexPolygon::Tag::segment;
        out.v = h;
        return out;
    }
    if (h.size() < 3) {
        out.tag = h.size() == 1 ? ConvexPolygon::Tag::point : ConvexPolygon::Tag::empty;
        out.v = h;
        return out;
    }
    out.tag = ConvexPolygon::Tag::proper;
    out.v = std::move(h);
    return out;
}

ConvexPolygon clip(const ConvexPolygon& poly, const Halfspace& h) {
    if (h.degenerate) return poly;
    if (h.anchor.size() != 2 || h.normal.size() != 2)
        throw GeometryError("clip: halfspace is not planar");
    if (poly.tag == ConvexPolygon::Tag::empty) return poly;

    const Vec2 n(h.normal[0], h.normal[1]);
    const Vec2 a(h.anchor[0], h.anchor[1]);
    auto margin = [&](const Vec2& y) { return n.dot(y - a); };

    if (!poly.proper()) {
        // point / segment inputs: keep whatever survives
        std::vector<Vec2> kept;
        for (const auto& p : poly.v)
            if (margin(p) >= 0.0) kept.push_back(p);
        if (poly.tag == ConvexPolygon::Tag::segment && kept.size() == 1 && poly.v.size() == 2) {
            const double m0 = margin(poly.v[0]), m1 = margin(poly.v[1]);
            if (m0 * m1 < 0.0) {
                const double t = m0 / (m0 - m1);
                kept.push_back(poly.v[0] + t * (poly.v[1] - poly.v[0]));
            }
        }
        return convex_hull(kept);
    }

    std::vector<Vec2> kept;
    const size_t nv = poly.v.size();
    for (size_t i = 0; i < nv; ++i) {
        const Vec2& p = poly.v[i];
        const Vec2& q = poly.v[(i + 1) % nv];
        const double mp = margin(p), mq = margin(q);
        if (mp >= 0.0) kept.push_back(p);
        if ((mp > 0.0 && mq < 0.0) || (mp < 0.0 && mq > 0.0)) {
            const double t = mp / (mp - mq);
            kept.push_back(p + t * (q - p));
        }
    }
    return convex_hull(kept);  // canonicalizes order and degeneracy
}

ConvexPolygon disk_polygon(const Disk& d, int k, double phase) {
    if (k < 8) throw GeometryError("disk_polygon: k must be at least 8");
    if (!(d.radius > 0.0)) throw GeometryError("disk_polygon: radius must be positive");
    ConvexPolygon out;
    out.tag = ConvexPolygon::Tag::proper;
    out.v.reserve(k);
    for (int i = 0; i < k; ++i) {
        const double t = phase + 2.0 * std::numbers::pi * i / k;
        out.v.emplace_back(d.center.x() + d.radius * std::cos(t),
                           d.center.y() + d.radius * std::sin(t));
    }
    return out;
}

Disk tangent_disk(const Vec2& x, const Vec2& g, double r) {
    const double n = g.norm();
    if (n == 0.0) throw GeometryError("tangent_disk: zero normal");
    if (!(r > 0.0)) throw GeometryError("tangent_disk: radius must be positive");
    return Disk{x + (r / n) * g, r};
}

Vec2 outward_edge_normal(const Vec2& from, const Vec2& to) {
    const Vec2 e = to - from;
    Vec2 n(e.y(), -e.x());  // right-hand normal of a CCW edge points outward
    const double len = n.norm();
    if (len == 0.0) throw GeometryError("edge normal: zero-length edge");
    return n / len;
}

ConvexPolygon offset_body(const ConvexPolygon& poly, double r, int arc_k) {
    if (!poly.proper()) throw GeometryError("offset_body: polygon is not proper");
    if (!(r > 0.0)) throw GeometryError("offset_body: r must be positive");
    if (arc_k < 1) throw GeometryError("offset_body: arc_k must be positive");

    const double step = (std::numbers::pi / 2.0) / arc_k;
    const size_t n = poly.v.size();
    std::vector<Vec2> pts;
    pts.reserve(n * 4);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& prev = poly.v[(i + n - 1) % n];
        const Vec2& cur = poly.v[i];
        const Vec2& next = poly.v[(i + 1) % n];
        const Vec2 n0 = outward_edge_normal(prev, cur);
        const Vec2 n1 = outward_edge_normal(cur, next);
        const double a0 = std::atan2(n0.y(), n0.x());
        double turn = std::atan2(n1.y(), n1.x()) - a0;
        while (turn < 0.0) turn += 2.0 * std::numbers::pi;
        if (turn < step) {
            // A nearly flat corner gets one point on its bisector.  The chord to the
            // neighbouring fan points stays outside the polygon (its clearance is
            // r*cos of the half-turn), so containment survives and repeated offsets
            // do not double the vertex count.
            const double t = a0 + 0.5 * turn;
            pts.emplace_back(cur.x() + r * std::cos(t), cur.y() + r * std::sin(t));
            continue;
        }
        const int segs = std::max(1, int(std::ceil(turn / step)));
        for (int s = 0; s <= segs; ++s) {
            const double t = a0 + turn * s / segs;
            pts.emplace_back(cur.x() + r * std::cos(t), cur.y() + r * std::sin(t));
        }
    }
    ConvexPolygon out = convex_hull(pts);
    if (!out.proper()) throw GeometryError("offset_body: degenerate result");
    return out;
}

double gauge(const ConvexPolygon& poly, const Vec2& a, const Vec2& x) {
    if (!poly.proper()) throw GeometryError("gauge: polygon is not proper");
    if (poly.min_margin(a) <= 0.0) throw GeometryError("gauge: anchor is not interior");
    const Vec2 d = x - a;
    if (d.norm() == 0.0) return 0.0;

    // boundary hit along the ray a + t*d: first edge with <n, d> > 0
    double t_exit = std::numeric_limits<double>::infinity();
    const size_t n = poly.v.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly.v[i];
        const Vec2 nrm = outward_edge_normal(p, poly.v[(i + 1) % n]);
        const double denom = nrm.dot(d);
        if (denom > 0.0) t_exit = std::min(t_exit, nrm.dot(p - a) / denom);
    }
    if (!std::isfinite(t_exit) || t_exit <= 0.0)
        throw GeometryError("gauge: ray does not leave the polygon");
    return 1.0 / t_exit;
}

bool minkowski_blend_membership(const ConvexPolygon& d1, const ConvexPolygon& d2, double s,
                                const Vec2& x) {
    if (!d1.proper() || !d2.proper())
        throw GeometryError("minkowski_blend_membership: bodies must be proper");
    if (s < 0.0 || s > 1.0) throw DomainError("minkowski_blend_membership: s outside [0,1]");
    std::vector<Vec2> sums;
    sums.reserve(d1.v.size() * d2.v.size());
    for (const auto& u : d1.v)
        for (const auto& w : d2.v) sums.push_back((1.0 - s) * u + s * w);
    return convex_hull(std::move(sums)).contains(x);
}

FrustumSurface::FrustumSurface(const LeveledBody& bottom, const LeveledBody& top)
    : level_lo(bottom.level), level_hi(top.level) {
    if (!bottom.polygon.proper() || !top.polygon.proper())
        throw GeometryError("frustum: bodies must be proper polygons");
    if (!(level_hi > level_lo)) throw GeometryError("frustum: levels must increase");

    auto add_normals = [&](const ConvexPolygon& p) {
        const size_t n = p.v.size();
        for (size_t i = 0; i < n; ++i)
            normals.push_back(outward_edge_normal(p.v[i], p.v[(i + 1) % n]));
    };
    add_normals(bottom.polygon);
    add_normals(top.polygon);

    auto support = [](const ConvexPolygon& p, const Vec2& u) {
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& v : p.v) s = std::max(s, u.dot(v));
        return s;
    };
    sup_lo.reserve(normals.size());
    sup_hi.reserve(normals.size());
    for (const auto& u : normals) {
        sup_lo.push_back(support(bottom.polygon, u));
        sup_hi.push_back(support(top.polygon, u));
    }
}

bool FrustumSurface::member(double s, const Vec2& x) const {
    // The blend's support is the blend of supports, and its facet normals are a subset
    // of the two bodies' normals, so testing those directions is exact.
    const double tol = geom_tol().containment;
    for (size_t i = 0; i < normals.size(); ++i)
        if (normals[i].dot(x) > (1.0 - s) * sup_lo[i] + s * sup_hi[i] + tol) return false;
    return true;
}

double FrustumSurface::eval(const Vec2& x) const {
    if (member(0.0, x)) return level_lo;  // on the bottom boundary (interior is the caller's bug)
    if (!member(1.0, x)) throw DomainError("frustum eval: point outside the top body");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (member(mid, x) ? hi : lo) = mid;
    }
    return (1.0 - hi) * level_lo + hi * level_hi;
}

double FrustumSurface::eval_direct(const Vec2& x) const {
    // x enters the blend section once every constraint <x,u> <= (1-s)lo + s*hi holds;
    // each solves to s >= (<x,u> - lo)/(hi - lo), with hi > lo by strict nesting.
    double s = 0.0;
    for (size_t i = 0; i < normals.size(); ++i) {
        const double gap = sup_hi[i] - sup_lo[i];
        if (!(gap > 0.0)) throw GeometryError("frustum: bodies have no support gap");
        s = std::max(s, (normals[i].dot(x) - sup_lo[i]) / gap);
    }
    if (s > 1.0 + geom_tol().containment)
        throw DomainError("frustum eval: point outside the top body");
    s = std::min(s, 1.0);
    return (1.0 - s) * level_lo + s * level_hi;
}

double frustum_eval(const LeveledBody& bottom, const LeveledBody& top, const Vec2& x) {
    const double tol = geom_tol().containment;
    if (bottom.polygon.min_margin(x) > tol)
        throw DomainError("frustum_eval: point is interior to the bottom body");
    return FrustumSurface(bottom, top).eval(x);
}

SteepnessValue steepness_bound(const Vec2& apex, double apex_level, const LeveledBody& base) {
    if (!base.polygon.proper()) throw GeometryError("steepness_bound: base is not proper");
    if (base.polygon.min_margin(apex) <= 0.0)
        throw GeometryError("steepness_bound: apex must be interior to the base");
    const double d = dist_to_boundary(base.polygon, apex);
    return SteepnessValue{std::abs(apex_level - base.level) / d, true};
}

double dist_to_boundary(const ConvexPolygon& poly, const Vec2& x) {
    if (!poly.proper()) throw GeometryError("dist_to_boundary: polygon is not proper");
    double best = std::numeric_limits<double>::infinity();
    const size_t n = poly.v.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly.v[i];
        const Vec2& q = poly.v[(i + 1) % n];
        const Vec2 e = q - p;
        const double t = std::clamp((x - p).dot(e) / e.squaredNorm(), 0.0, 1.0);
        best = std::min(best, (x - (p + t * e)).norm());
    }
    return best;
}

double max_vertex_dist(const ConvexPolygon& poly, const Vec2& x) {
    if (!poly.proper()) throw GeometryError("max_vertex_dist: polygon is not proper");
    double best = 0.0;
    for (const auto& v : poly.v) best = std::max(best, (v - x).norm());
    return best;
}

bool cone_inclusion_check(const Vec2& a, const Vec2& b, double theta, double delta, int samples) {
    if (!(delta > 0.0) || !(delta < theta) || !(theta < 1.0))
        throw DomainError("cone_inclusion_check: need 0 < delta < theta < 1");
    if (samples < 1) throw DomainError("cone_inclusion_check: samples must be positive");

    const Vec2 c = (1.0 - theta) * a + theta * b;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);  // fixed stream: same inputs, same verdict
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // x - c in cone(B(c - a, delta))  <=>  dist(c - a, ray through x - c) <= delta
    auto member = [&](const Vec2& x) {
        const Vec2 p = c - a;
        const Vec2 d = x - c;
        const double dn = d.norm();
        if (dn == 0.0) return true;
        const double along = p.dot(d) / dn;
        const double dist = along <= 0.0 ? p.norm() : (p - (along / dn) * d).norm();
        return dist <= delta * (1.0 + 1e-9) + 1e-12;
    };

    for (int i = 0; i < samples; ++i) {
        const double r = delta * std::sqrt(unif(rng));
        const double ang = 2.0 * std::numbers::pi * unif(rng);
        const Vec2 u = a + Vec2(r * std::cos(ang), r * std::sin(ang));
        const double t = 50.0 * unif(rng);
        const Vec2 x = b + t * (b - u);
        if (!member(x)) return false;
    }
    return true;
}

}  // namespace pforge

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pforge/geometry2d.hpp"

using namespace pforge;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

ConvexPolygon unit_square() {
    return convex_hull({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)});
}

ConvexPolygon box(double half) {
    return convex_hull({Vec2(-half, -half), Vec2(half, -half), Vec2(half, half),
                        Vec2(-half, half)});
}

std::mt19937_64 seeded(unsigned s) { return std::mt19937_64(s); }

}  // namespace

TEST_CASE("convex hull canonicalizes: duplicates, interior and collinear points vanish") {
    ConvexPolygon h = convex_hull({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1),
                                   Vec2(0.5, 0.5), Vec2(1, 0), Vec2(0.5, 0), Vec2(0, 0.5)});
    REQUIRE(h.tag == ConvexPolygon::Tag::proper);
    REQUIRE(h.v.size() == 4);
    CHECK(h.v[0] == Vec2(0, 0));
    CHECK(h.v[1] == Vec2(1, 0));
    CHECK(h.v[2] == Vec2(1, 1));
    CHECK(h.v[3] == Vec2(0, 1));
}

TEST_CASE("convex hull degenerate tags") {
    CHECK(convex_hull({}).tag == ConvexPolygon::Tag::empty);
    CHECK(convex_hull({Vec2(2, 3), Vec2(2, 3)}).tag == ConvexPolygon::Tag::point);
    ConvexPolygon seg = convex_hull({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)});
    CHECK(seg.tag == ConvexPolygon::Tag::segment);
    CHECK_FALSE(seg.proper());
}

TEST_CASE("convex hull properties over random clouds") {
    auto rng = seeded(101);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Vec2> pts;
        int n = 3 + int(rng() % 20);
        for (int i = 0; i < n; ++i) pts.emplace_back(unif(rng), unif(rng));
        ConvexPolygon h = convex_hull(pts);
        if (!h.proper()) continue;
        for (const Vec2& p : pts) CHECK(h.contains(p, 1e-9));
        const size_t m = h.v.size();
        for (size_t i = 0; i < m; ++i) {
            Vec2 e1 = h.v[(i + 1) % m] - h.v[i];
            Vec2 e2 = h.v[(i + 2) % m] - h.v[(i + 1) % m];
            CHECK(e1.x() * e2.y() - e1.y() * e2.x() > 0.0);  // strictly convex turns, CCW
        }
        ConvexPolygon hh = convex_hull(h.v);
        REQUIRE(hh.v.size() == m);
        for (size_t i = 0; i < m; ++i) CHECK((hh.v[i] - h.v[i]).norm() == 0.0);
    }
}

TEST_CASE("clip against a halfspace keeps exactly the inside part") {
    Vec anchor(2), normal(2);
    anchor << 0.5, 0.25;
    normal << 1, 0;
    Halfspace h{anchor, normal, false};
    ConvexPolygon c = clip(unit_square(), h);
    REQUIRE(c.v.size() == 4);
    CHECK(c.v[0] == Vec2(0.5, 0));
    CHECK(c.v[1] == Vec2(1, 0));
    CHECK(c.v[2] == Vec2(1, 1));
    CHECK(c.v[3] == Vec2(0.5, 1));

    anchor << 5, 0;
    ConvexPolygon gone = clip(unit_square(), Halfspace{anchor, normal, false});
    CHECK(gone.tag == ConvexPolygon::Tag::empty);

    anchor << 1, 0;
    ConvexPolygon edge = clip(unit_square(), Halfspace{anchor, normal, false});
    CHECK(edge.tag == ConvexPolygon::Tag::segment);
}

TEST_CASE("clip order does not matter and output stays inside both constraints") {
    auto rng = seeded(202);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        ConvexPolygon p = box(2.0 + (trial % 3));
        Vec a1(2), n1(2), a2(2), n2(2);
        a1 << unif(rng), unif(rng);
        n1 << unif(rng), unif(rng);
        a2 << unif(rng), unif(rng);
        n2 << unif(rng), unif(rng);
        if (n1.norm() < 1e-3 || n2.norm() < 1e-3) continue;
        Halfspace h1{a1, n1, false}, h2{a2, n2, false};
        ConvexPolygon c12 = clip(clip(p, h1), h2);
        ConvexPolygon c21 = clip(clip(p, h2), h1);
        CHECK(c12.tag == c21.tag);
        if (c12.proper()) {
            CHECK(c12.area() == doctest::Approx(c21.area()).epsilon(1e-7));
            for (const Vec2& v : c12.v) {
                Vec vv(2);
                vv << v.x(), v.y();
                CHECK(signed_margin(h1, vv) >= -1e-9);
                CHECK(signed_margin(h2, vv) >= -1e-9);
                CHECK(p.contains(v, 1e-9));
            }
        }
    }
}

TEST_CASE("inscribed disk polygon: vertex count, radius, pinned phase vertex") {
    Disk d{Vec2(2, -1), 1.5};
    ConvexPolygon p = disk_polygon(d, 32, 0.0);
    REQUIRE(p.v.size() == 32);
    for (const Vec2& v : p.v) CHECK((v - d.center).norm() == doctest::Approx(1.5).epsilon(1e-12));
    double phase = 1.2345;
    ConvexPolygon q = disk_polygon(d, 32, phase);
    Vec2 want = d.center + 1.5 * Vec2(std::cos(phase), std::sin(phase));
    double best = 1e300;
    for (const Vec2& v : q.v) best = std::min(best, (v - want).norm());
    CHECK(best < 1e-12);
    CHECK_THROWS_AS(disk_polygon(d, 4, 0.0), GeometryError);
}

TEST_CASE("tangent disk kisses the hyperplane from inside") {
    Vec x(2), g(2);
    x << 1, 1;
    g << 0, 2;
    Disk d = tangent_disk(Vec2(1, 1), Vec2(0, 2), 0.5);
    CHECK(d.center == Vec2(1, 1.5));
    CHECK(d.radius == 0.5);
    Halfspace h = halfspace_plus(x, g);
    ConvexPolygon poly = disk_polygon(d, 64, -std::numbers::pi / 2);
    for (const Vec2& v : poly.v) {
        Vec vv(2);
        vv << v.x(), v.y();
        CHECK(signed_margin(h, vv) >= -1e-12);
    }
}

TEST_CASE("offset body: every new vertex sits exactly r outside, containment grows") {
    ConvexPolygon sq = unit_square();
    ConvexPolygon grown = offset_body(sq, 0.25, 8);
    REQUIRE(grown.proper());
    auto dist_to = [](const ConvexPolygon& p, const Vec2& x) {
        double best = 1e300;
        const size_t n = p.v.size();
        for (size_t i = 0; i < n; ++i) {
            Vec2 a = p.v[i], b = p.v[(i + 1) % n], e = b - a;
            double t = std::clamp((x - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
            best = std::min(best, (x - (a + t * e)).norm());
        }
        return best;
    };
    for (const Vec2& v : grown.v) CHECK(dist_to(sq, v) == doctest::Approx(0.25).epsilon(1e-9));
    for (const Vec2& v : sq.v) CHECK(grown.min_margin(v) > 0.2);
    // support in any direction grows by at most r (inscribed arcs), at least r*cos(step/2)
    auto rng = seeded(303);
    std::uniform_real_distribution<double> unif(0.0, 2 * std::numbers::pi);
    auto support = [](const ConvexPolygon& p, const Vec2& u) {
        double s = -1e300;
        for (const Vec2& v : p.v) s = std::max(s, u.dot(v));
        return s;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        double ang = unif(rng);
        Vec2 u(std::cos(ang), std::sin(ang));
        double gap = support(grown, u) - support(sq, u);
        CHECK(gap <= 0.25 + 1e-12);
        CHECK(gap >= 0.25 * std::cos(std::numbers::pi / 32) - 1e-12);
    }
}

TEST_CASE("gauge: unit box from the center, homogeneity and convexity") {
    ConvexPolygon b = box(1.0);
    Vec2 a(0, 0);
    CHECK(gauge(b, a, Vec2(0, 0)) == 0.0);
    CHECK(gauge(b, a, Vec2(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gauge(b, a, Vec2(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gauge(b, a, Vec2(2, 0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gauge(b, a, Vec2(-3, 2)) == doctest::Approx(3.0).epsilon(1e-12));

    auto rng = seeded(404);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    std::uniform_real_distribution<double> tpos(0.01, 3.0);
    ConvexPolygon poly = convex_hull({Vec2(-2, -1), Vec2(3, -2), Vec2(4, 2), Vec2(0, 3),
                                      Vec2(-3, 1)});
    Vec2 anchor(0.5, 0.25);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec2 x(unif(rng), unif(rng));
        Vec2 y(unif(rng), unif(rng));
        double t = tpos(rng);
        double gx = gauge(poly, anchor, x);
        CHECK(gauge(poly, anchor, anchor + t * (x - anchor)) ==
              doctest::Approx(t * gx).epsilon(1e-9));
        double s = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        Vec2 mid = anchor + (1 - s) * (x - anchor) + s * (y - anchor);
        double gmid = gauge(poly, anchor, mid);
        CHECK(gmid <= (1 - s) * gx + s * gauge(poly, anchor, y) + 1e-9);
        CHECK((gx <= 1.0) == poly.contains(x, 1e-9));
    }
    CHECK_THROWS_AS(gauge(poly, Vec2(100, 0), Vec2(0, 0)), GeometryError);
}

TEST_CASE("blend membership matches the support-table frustum predicate") {
    ConvexPolygon inner = convex_hull({Vec2(-1, -1), Vec2(1.5, -0.5), Vec2(1, 1), Vec2(-0.5, 1.2)});
    ConvexPolygon outer = convex_hull({Vec2(-4, -3), Vec2(4, -4), Vec2(5, 3), Vec2(-3, 4)});
    FrustumSurface fs(LeveledBody{inner, 1.0}, LeveledBody{outer, 2.0});
    auto rng = seeded(505);
    std::uniform_real_distribution<double> unif(-6.0, 6.0);
    std::uniform_real_distribution<double> su(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec2 x(unif(rng), unif(rng));
        double s = su(rng);
        CHECK(minkowski_blend_membership(inner, outer, s, x) == fs.member(s, x));
    }
}

TEST_CASE("square-in-square frustum heights are exact") {
    LeveledBody bottom{box(1.0), 1.0};
    LeveledBody top{box(3.0), 3.0};
    FrustumSurface fs(bottom, top);
    // blend section at s is the box of half-width 1+2s; x=(2,0) crosses at s=0.5.
    // The bisection answer sits half a containment tolerance below the exact
    // crossing, so it gets a looser epsilon than the closed form.
    CHECK(fs.eval(Vec2(2, 0)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fs.eval_direct(Vec2(2, 0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fs.eval(Vec2(3, 3)) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fs.eval(Vec2(1, 0)) == doctest::Approx(1.0));
    // max |coord| = 2.5 crosses 1+2s at s=0.75, level (1-s)*1 + s*3 = 2.5
    CHECK(fs.eval_direct(Vec2(-2.5, 2.5)) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(fs.eval(Vec2(10, 0)), DomainError);
    CHECK_THROWS_AS(fs.eval_direct(Vec2(10, 0)), DomainError);
    CHECK(frustum_eval(bottom, top, Vec2(2, 0)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(frustum_eval(bottom, top, Vec2(0, 0)), DomainError);
}

TEST_CASE("bisection and direct frustum heights agree on skew bodies") {
    ConvexPolygon inner = convex_hull({Vec2(-1, 0), Vec2(0.5, -1), Vec2(2, 0.5), Vec2(0, 1.5)});
    ConvexPolygon outer = convex_hull({Vec2(-5, -2), Vec2(6, -3), Vec2(7, 4), Vec2(-4, 5)});
    FrustumSurface fs(LeveledBody{inner, 2.0}, LeveledBody{outer, 7.0});
    auto rng = seeded(606);
    std::uniform_real_distribution<double> unif(-5.0, 6.0);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 1000; ++trial) {
        Vec2 x(unif(rng), unif(rng));
        if (!fs.member(1.0, x)) continue;
        ++checked;
        CHECK(fs.eval(x) == doctest::Approx(fs.eval_direct(x)).epsilon(1e-8));
    }
    CHECK(checked == 1000);
}

TEST_CASE("steepness bound of a cone over its base") {
    SteepnessValue s = steepness_bound(Vec2(0, 0), -1.0, LeveledBody{box(1.0), 1.0});
    CHECK(s.finite);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(steepness_bound(Vec2(5, 0), 0.0, LeveledBody{box(1.0), 1.0}),
                    GeometryError);
}

TEST_CASE("cone inclusion holds along a path direction and validates its inputs") {
    CHECK(cone_inclusion_check(Vec2(0, 0), Vec2(4, 1), 0.9, 0.3, 2000));
    CHECK(cone_inclusion_check(Vec2(-2, 3), Vec2(5, -1), 0.5, 0.05, 2000));
    CHECK_THROWS_AS(cone_inclusion_check(Vec2(0, 0), Vec2(1, 0), 1.5, 0.3, 10), DomainError);
    CHECK_THROWS_AS(cone_inclusion_check(Vec2(0, 0), Vec2(1, 0), 0.5, 0.7, 10), DomainError);
    CHECK_THROWS_AS(cone_inclusion_check(Vec2(0, 0), Vec2(1, 0), 0.5, 0.1, 0), DomainError);
}

TEST_CASE("boundary distances from the center of a box") {
    ConvexPolygon b = box(1.0);
    CHECK(dist_to_boundary(b, Vec2(0, 0)) == doctest::Approx(1.0));
    CHECK(max_vertex_dist(b, Vec2(0, 0)) == doctest::Approx(kSqrt2).epsilon(1e-12));
    CHECK(dist_to_boundary(b, Vec2(0.5, 0)) == doctest::Approx(0.5));
}

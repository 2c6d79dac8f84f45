#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pforge/penalty_builder.hpp"
#include "pforge/verifier.hpp"

using namespace pforge;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

SubgradientOracle half_sq_norm() {
    LossSpec spec;
    spec.kind = LossSpec::Kind::shifted_quadratic;
    spec.dim = 2;
    spec.c = v2(0, 0);
    return make_oracle(spec);
}

struct Pipeline {
    SearchPath path;
    PathGroups groups;
    AdmissibilityReport report;
};

Pipeline descent_pipeline() {
    Pipeline p;
    p.path = run_gradient_descent(half_sq_norm(), v2(1, 1), 0.4, 5);
    p.groups = group_by_value(p.path, 0.0);
    p.report = check_admissibility(p.path, p.groups);
    return p;
}

ConvexPolygon box(double half) {
    return convex_hull({Vec2(-half, -half), Vec2(half, -half), Vec2(half, half),
                        Vec2(-half, half)});
}

PenaltyModel concentric_boxes() {
    PenaltyModel m;
    m.anchor = Vec2(0, 0);
    m.shells.push_back(LeveledBody{box(1.0), 0.0});
    m.shells.push_back(LeveledBody{box(3.0), 0.0});
    return m;
}

}  // namespace

TEST_CASE("anchor choice takes the witness with half its clearance, capped at one") {
    Pipeline p = descent_pipeline();
    auto [a, eps] = choose_anchor(p.report);
    CHECK(a.x() == doctest::Approx(p.report.cond_iii.witness(0)));
    CHECK(a.y() == doctest::Approx(p.report.cond_iii.witness(1)));
    CHECK(eps == doctest::Approx(std::min(p.report.cond_iii.radius / 2.0, 1.0)));

    AdmissibilityReport bad;
    bad.admissible = false;
    CHECK_THROWS_AS(choose_anchor(bad), BuildError);
}

TEST_CASE("group hull pins the path point as an exact vertex of its tangent disk") {
    SubgradientOracle f = half_sq_norm();
    SearchPath path = ingest_path({v2(1, 1), v2(0.36, 0.36)}, f);
    std::vector<Halfspace> later{halfspace_plus(path.points[1], path.subgradients[1])};
    ConvexPolygon hull = build_group_hull({0}, path, later, 0.5);
    REQUIRE(hull.proper());
    bool pinned = false;
    for (const Vec2& v : hull.v)
        if (v.x() == 1.0 && v.y() == 1.0) pinned = true;
    CHECK(pinned);
    CHECK(hull.min_margin(Vec2(1, 1)) == doctest::Approx(0.0));
    // the disk hangs on the uphill side of the point's hyperplane
    Halfspace h = halfspace_plus(path.points[0], path.subgradients[0]);
    for (const Vec2& v : hull.v) {
        Vec vv(2);
        vv << v.x(), v.y();
        CHECK(signed_margin(h, vv) >= -1e-9);
    }
}

TEST_CASE("group hull shrinks the tangent ball to respect later halfspaces") {
    SubgradientOracle f = half_sq_norm();
    // second point's halfspace tilts against the first's ball
    SearchPath path = ingest_path({v2(2, 0), v2(0.5, 0.5)}, f);
    std::vector<Halfspace> later{halfspace_plus(path.points[1], path.subgradients[1])};
    ConvexPolygon hull = build_group_hull({0}, path, later, 10.0);
    Halfspace h = later[0];
    for (const Vec2& v : hull.v) {
        Vec vv(2);
        vv << v.x(), v.y();
        CHECK(signed_margin(h, vv) > 0.0);
    }
}

TEST_CASE("a group of stationary points becomes a clearance hull around them") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::custom_tabulated;
    spec.dim = 2;
    spec.data = Mat(1, 3);
    spec.data << 0, 0, 4.0;  // constant loss: every subgradient is zero
    SubgradientOracle f = make_oracle(spec);
    SearchPath path = ingest_path({v2(0, 0), v2(1, 0)}, f);
    ConvexPolygon hull = build_group_hull({0, 1}, path, {}, 0.25);
    REQUIRE(hull.proper());
    CHECK(hull.min_margin(Vec2(0, 0)) > 0.0);
    CHECK(hull.min_margin(Vec2(1, 0)) > 0.0);
    CHECK(hull.min_margin(Vec2(0.5, 0)) > 0.2);
}

TEST_CASE("shells nest strictly and touch their path points") {
    Pipeline p = descent_pipeline();
    auto [a, eps] = choose_anchor(p.report);
    BuildResult built = build_shells(p.path, p.groups, a, eps);
    REQUIRE(built.model.shells.size() == 6);
    CHECK(built.model.shells[0].polygon.min_margin(a) > 0.0);
    for (std::size_t j = 0; j + 1 < built.model.shells.size(); ++j)
        for (const Vec2& v : built.model.shells[j].polygon.v)
            CHECK(built.model.shells[j + 1].polygon.min_margin(v) > 1e-9);
    REQUIRE(built.certificates.size() == p.path.size());
    for (const auto& cert : built.certificates) {
        CHECK(cert.boundary_dist <= 1e-6);
        CHECK(cert.normal_residual <= 1e-6);
        CHECK(cert.shell == cert.point);  // singleton groups, one shell per point
        CHECK_FALSE(cert.joint_minimizer);
    }
}

TEST_CASE("level assignment on hand-checked concentric boxes") {
    PenaltyModel m = concentric_boxes();
    assign_levels(m);
    CHECK(m.shells[0].level == doctest::Approx(1.0));
    // steepness 1, apex 1 - 2*sqrt(2), scale factor 3 to reach the outer box
    CHECK(m.shells[1].level == doctest::Approx(1.0 + 4.0 * kSqrt2).epsilon(1e-12));
    // ring slope (c1-c0)/gap = 4*sqrt(2)/2 beats the inner cone's slope 1
    double steep = 2.0 * kSqrt2;
    double want_apex = 1.0 - (steep + 1.0) * 3.0 * kSqrt2;
    CHECK(m.outer_apex_level == doctest::Approx(want_apex).epsilon(1e-12));
    CHECK(m.anchor_level == 0.0);
}

TEST_CASE("penalty evaluation across core, ring and exterior of the box model") {
    PenaltyModel m = concentric_boxes();
    assign_levels(m);
    PenaltyEvaluator psi(m);
    const double c1 = 1.0 + 4.0 * kSqrt2;

    CHECK(psi(Vec2(0, 0)) == 0.0);
    CHECK(psi(Vec2(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(psi(Vec2(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    // ring: the blend box of half-width 1+2s reaches (2,0) at s=1/2
    CHECK(psi(Vec2(2, 0)) == doctest::Approx(0.5 + 0.5 * c1).epsilon(1e-12));
    CHECK(psi(Vec2(3, 3)) == doctest::Approx(c1).epsilon(1e-12));
    // exterior: gauge 2 along the outer cone from the sunken apex
    double p_out = m.outer_apex_level;
    CHECK(psi(Vec2(6, 0)) == doctest::Approx(p_out + 2.0 * (c1 - p_out)).epsilon(1e-12));

    CHECK(eval_penalty(m, Vec2(0.5, 0)) == doctest::Approx(0.5));
}

TEST_CASE("the built penalty is convex along random segments") {
    Pipeline p = descent_pipeline();
    BuildResult built = build_penalty(p.path, p.groups, p.report);
    PenaltyEvaluator psi(built.model);
    std::mt19937_64 rng(707);
    double extent = 0.0;
    for (const Vec2& v : built.model.shells.back().polygon.v)
        extent = std::max({extent, std::abs(v.x()), std::abs(v.y())});
    std::uniform_real_distribution<double> unif(-2.0 * extent, 2.0 * extent);
    std::uniform_real_distribution<double> su(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec2 x(unif(rng), unif(rng)), y(unif(rng), unif(rng));
        double s = su(rng);
        Vec2 mid = (1 - s) * x + s * y;
        double lhs = psi(mid);
        double rhs = (1 - s) * psi(x) + s * psi(y);
        CHECK(lhs <= rhs + 1e-7 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("penalty value equals the shell level at every path point") {
    Pipeline p = descent_pipeline();
    BuildResult built = build_penalty(p.path, p.groups, p.report);
    PenaltyEvaluator psi(built.model);
    for (std::size_t i = 0; i < p.path.size(); ++i) {
        double level = built.model.shells[i].level;
        Vec2 x(p.path.points[i](0), p.path.points[i](1));
        CHECK(psi(x) == doctest::Approx(level).epsilon(1e-9));
    }
}

TEST_CASE("lambda extraction balances the loss slope against the penalty slope") {
    Pipeline p = descent_pipeline();
    BuildResult built = build_penalty(p.path, p.groups, p.report);
    SubgradientOracle f = half_sq_norm();
    LambdaSchedule sched = extract_lambdas(built.model, p.path, p.groups, f);
    PenaltyEvaluator psi(built.model);
    REQUIRE(sched.lambdas.size() == p.path.size());
    for (std::size_t i = 0; i < p.path.size(); ++i) {
        CHECK(sched.lambdas[i] > 0.0);
        CHECK(sched.methods[i] == LambdaSchedule::Method::ratio);
        Vec2 x(p.path.points[i](0), p.path.points[i](1));
        Vec2 dir = -Vec2(p.path.subgradients[i](0), p.path.subgradients[i](1)).normalized();
        double h = 1e-5 * (1.0 + x.norm());
        double slope = (psi(x + h * dir) - psi(x)) / h;
        CHECK(sched.lambdas[i] * slope ==
              doctest::Approx(p.path.subgradients[i].norm()).epsilon(1e-6));
    }
    // lambda weakens as the path walks away from the anchor toward the loss minimum
    for (std::size_t i = 0; i + 1 < sched.lambdas.size(); ++i)
        CHECK(sched.lambdas[i] > sched.lambdas[i + 1]);
}

TEST_CASE("build refuses an inadmissible report") {
    Pipeline p = descent_pipeline();
    AdmissibilityReport bad = p.report;
    bad.admissible = false;
    CHECK_THROWS_AS(build_penalty(p.path, p.groups, bad), BuildError);
}

TEST_CASE("evaluator validation rejects broken models") {
    PenaltyModel m = concentric_boxes();
    assign_levels(m);
    PenaltyModel no_shells = m;
    no_shells.shells.clear();
    CHECK_THROWS_AS(PenaltyEvaluator{no_shells}, BuildError);
    PenaltyModel bad_levels = m;
    bad_levels.shells[1].level = 0.5;
    CHECK_THROWS_AS(PenaltyEvaluator{bad_levels}, BuildError);
    PenaltyModel far_anchor = m;
    far_anchor.anchor = Vec2(50, 0);
    CHECK_THROWS_AS(PenaltyEvaluator{far_anchor}, BuildError);
    PenaltyModel high_apex = m;
    high_apex.outer_apex_level = high_apex.shells.back().level + 1.0;
    CHECK_THROWS_AS(PenaltyEvaluator{high_apex}, BuildError);
}

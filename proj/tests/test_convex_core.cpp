#include <doctest.h>

#include <cmath>
#include <random>

#include "pforge/convex_core.hpp"

using namespace pforge;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("quadratic loss: value and gradient at a hand-checked point") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::quadratic;
    spec.dim = 2;
    spec.A = Mat(2, 2);
    spec.A << 2, 1, 0, 3;
    spec.b = v2(1, -2);
    SubgradientOracle f = make_oracle(spec);

    // r = A(0.5,-1) - b = (0,-3) - (1,-2) = (-1,-1); f = 0.5*|r|^2 = 1
    Vec x = v2(0.5, -1.0);
    CHECK(f.eval(x) == doctest::Approx(1.0).epsilon(1e-14));
    // grad = A^T r = (-2, -4)
    Vec g = f.subgrad(x);
    CHECK(g(0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(g(1) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("shifted quadratic centers at c") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::shifted_quadratic;
    spec.dim = 2;
    spec.c = v2(1, 2);
    SubgradientOracle f = make_oracle(spec);
    CHECK(f.eval(v2(4, 6)) == doctest::Approx(12.5).epsilon(1e-14));
    Vec g = f.subgrad(v2(4, 6));
    CHECK(g(0) == doctest::Approx(3.0));
    CHECK(g(1) == doctest::Approx(4.0));
    CHECK(f.eval(spec.c) == 0.0);
}

TEST_CASE("logistic loss: ln 2 at the origin, overflow-safe at huge margins") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::logistic;
    spec.dim = 2;
    spec.data = Mat(1, 3);
    spec.data << 1, 0, 1;  // x = (1,0), y = +1
    SubgradientOracle f = make_oracle(spec);

    CHECK(f.eval(v2(0, 0)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    Vec g = f.subgrad(v2(0, 0));
    CHECK(g(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g(1) == doctest::Approx(0.0));

    CHECK(std::isfinite(f.eval(v2(1000, 0))));
    CHECK(f.eval(v2(1000, 0)) == doctest::Approx(0.0));
    LossSpec neg = spec;
    neg.data(0, 2) = -1;
    SubgradientOracle fn = make_oracle(neg);
    CHECK(fn.eval(v2(1000, 0)) == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("tabulated max-affine loss with finite-difference subgradients") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::custom_tabulated;
    spec.dim = 2;
    spec.data = Mat(2, 3);
    spec.data << 1, 0, 0, -1, 0, 0;  // max(x1, -x1) = |x1|
    SubgradientOracle f = make_oracle(spec);
    CHECK(f.eval(v2(2, 5)) == doctest::Approx(2.0));
    CHECK(f.eval(v2(-3, 0)) == doctest::Approx(3.0));
    Vec g = f.subgrad(v2(2, 0));
    CHECK(g(0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(g(1)) < 1e-9);
}

TEST_CASE("oracles reject inputs of the wrong dimension") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::shifted_quadratic;
    spec.dim = 2;
    spec.c = v2(0, 0);
    SubgradientOracle f = make_oracle(spec);
    Vec bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(f.eval(bad), DomainError);
    CHECK_THROWS_AS(f.subgrad(bad), DomainError);
}

TEST_CASE("halfspace from a point and subgradient") {
    Halfspace h = halfspace_plus(v2(1, 0), v2(2, 0));
    CHECK_FALSE(h.degenerate);
    CHECK(h.membership(v2(3, 5)));
    CHECK_FALSE(h.membership(v2(0, 0)));
    CHECK(signed_margin(h, v2(3, 0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(signed_margin(h, v2(0, 0)) == doctest::Approx(-1.0).epsilon(1e-14));

    Halfspace d = halfspace_plus(v2(1, 0), v2(0, 0));
    CHECK(d.degenerate);
    CHECK(d.membership(v2(-100, 50)));
    CHECK_THROWS_AS(signed_margin(d, v2(0, 0)), DomainError);
}

TEST_CASE("signed margin moves one-for-one along the unit normal") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Vec x = v2(unif(rng), unif(rng));
        Vec g = v2(unif(rng), unif(rng));
        if (g.norm() < 1e-6) continue;
        Halfspace h = halfspace_plus(x, g);
        Vec y = v2(unif(rng), unif(rng));
        double t = unif(rng);
        Vec n = g.normalized();
        double base = signed_margin(h, y);
        double moved = signed_margin(h, y + t * n);
        CHECK(moved == doctest::Approx(base + t).epsilon(1e-9));
    }
}

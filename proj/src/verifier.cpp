#include "pforge/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "pforge/errors.hpp"
#include "pforge/pathkit.hpp"

namespace pforge {

namespace {

Vec2 to2(const Vec& x) { return Vec2(x(0), x(1)); }

Vec to_n(const Vec2& x) {
    Vec v(2);
    v << x.x(), x.y();
    return v;
}

double simplex_diameter(const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::max({(a - b).norm(), (a - c).norm(), (b - c).norm()});
}

// Axis-aligned descent sweep; mops up the last digits when the objective is kinked.
void coordinate_polish(const Objective2d& obj, Vec2& x, double& fx, double step) {
    const Vec2 dirs[4] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
    while (step > 1e-10) {
        bool moved = false;
        for (const Vec2& d : dirs) {
            Vec2 y = x + step * d;
            double fy = obj(y);
            if (fy < fx) {
                x = y;
                fx = fy;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
}

}  // namespace

MinimizeResult nelder_mead(const Objective2d& obj, const Vec2& start, double scale,
                           double tol_diam, int max_iter) {
    struct Node {
        Vec2 x;
        double f;
    };
    std::array<Node, 3> s = {Node{start, obj(start)},
                             Node{start + Vec2(scale, 0), obj(start + Vec2(scale, 0))},
                             Node{start + Vec2(0, scale), obj(start + Vec2(0, scale))}};
    auto sort_nodes = [&] {
        std::sort(s.begin(), s.end(), [](const Node& l, const Node& r) { return l.f < r.f; });
    };
    sort_nodes();

    MinimizeResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (simplex_diameter(s[0].x, s[1].x, s[2].x) < tol_diam) break;
        Vec2 centroid = 0.5 * (s[0].x + s[1].x);
        Vec2 xr = centroid + (centroid - s[2].x);
        double fr = obj(xr);
        if (fr < s[0].f) {
            Vec2 xe = centroid + 2.0 * (centroid - s[2].x);
            double fe = obj(xe);
            s[2] = fe < fr ? Node{xe, fe} : Node{xr, fr};
        } else if (fr < s[1].f) {
            s[2] = Node{xr, fr};
        } else {
            Vec2 xc = centroid + 0.5 * (s[2].x - centroid);
            double fc = obj(xc);
            if (fc < s[2].f) {
                s[2] = Node{xc, fc};
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k].x = s[0].x + 0.5 * (s[k].x - s[0].x);
                    s[k].f = obj(s[k].x);
                }
            }
        }
        sort_nodes();
    }
    res.argmin = s[0].x;
    res.value = s[0].f;
    res.iterations = it;
    res.simplex_diameter = simplex_diameter(s[0].x, s[1].x, s[2].x);
    res.converged = res.simplex_diameter < tol_diam;
    coordinate_polish(obj, res.argmin, res.value, std::max(res.simplex_diameter, 1e-7));
    return res;
}

MinimizeResult minimize_penalized(const SubgradientOracle& f, const Objective2d& penalty,
                                  double lambda, const Vec2& x_init, const Vec2& bbox_center,
                                  double bbox_half_width) {
    Objective2d obj = [&](const Vec2& y) { return f.eval(to_n(y)) + lambda * penalty(y); };

    const int n_grid = 64;
    const int n_stages = 3;
    Vec2 center = bbox_center;
    double hw = bbox_half_width;
    Vec2 best = x_init;
    double fbest = std::numeric_limits<double>::infinity();
    MinimizeResult res;

    for (int stage = 0; stage < n_stages; ++stage) {
        int bi = -1, bj = -1;
        for (int i = 0; i < n_grid; ++i) {
            double x = center.x() - hw + 2.0 * hw * i / (n_grid - 1);
            for (int j = 0; j < n_grid; ++j) {
                double y = center.y() - hw + 2.0 * hw * j / (n_grid - 1);
                Vec2 p(x, y);
                double fp = obj(p);
                if (fp < fbest) {
                    fbest = fp;
                    best = p;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (stage == 0) {
            if (bi >= 0 && (bi == 0 || bi == n_grid - 1 || bj == 0 || bj == n_grid - 1))
                throw DomainError(
                    "grid incumbent landed on the search box boundary; box too small");
            double finit = obj(x_init);
            if (finit < fbest) {  // the warm start may beat every coarse cell
                fbest = finit;
                best = x_init;
            }
        }
        res.stage_values.push_back(fbest);
        center = best;
        hw /= 8.0;
    }

    double cell = 2.0 * hw * 8.0 / (n_grid - 1);  // final stage's spacing
    MinimizeResult nm = nelder_mead(obj, best, cell, 1e-8, 600);
    if (nm.value <= fbest) {
        res.argmin = nm.argmin;
        res.value = nm.value;
    } else {
        res.argmin = best;
        res.value = fbest;
    }
    res.iterations = nm.iterations;
    res.converged = nm.converged;
    res.simplex_diameter = nm.simplex_diameter;
    res.stage_values.push_back(res.value);
    return res;
}

MinimizeResult minimize_penalized(const SubgradientOracle& f, const PenaltyEvaluator& psi,
                                  double lambda, const Vec2& x_init, const Vec2& bbox_center,
                                  double bbox_half_width) {
    return minimize_penalized(
        f, [&psi](const Vec2& y) { return psi(y); }, lambda, x_init, bbox_center,
        bbox_half_width);
}

VerificationReport verify_schedule(const SearchPath& path, const SubgradientOracle& f,
                                   const PenaltyModel& model, const LambdaSchedule& schedule,
                                   double tol, std::uint64_t seed) {
    if (schedule.lambdas.size() != path.size())
        throw ConfigError("schedule length does not match the path");
    PenaltyEvaluator psi(model);

    ConvexPolygon box = default_bbox(path);
    Vec2 center = box.centroid();
    double hw = 0.0;
    for (const Vec2& v : box.v)
        hw = std::max({hw, std::abs(v.x() - center.x()), std::abs(v.y() - center.y())});
    for (const LeveledBody& shell : model.shells)
        for (const Vec2& v : shell.polygon.v)
            hw = std::max({hw, 1.25 * std::abs(v.x() - center.x()),
                           1.25 * std::abs(v.y() - center.y())});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    VerificationReport rep;
    rep.tolerance = tol;
    rep.all_pass = true;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Vec2 x = to2(path.points[i]);
        const double lambda = schedule.lambdas[i];

        MinimizeResult near =
            minimize_penalized(f, psi, lambda, x, center, hw);
        double angle = 2.0 * 3.14159265358979323846 * unif(rng);
        double rad = 0.5 * (1.0 + model.anchor.norm()) * std::sqrt(unif(rng));
        Vec2 far_init = model.anchor + rad * Vec2(std::cos(angle), std::sin(angle));
        MinimizeResult far =
            minimize_penalized(f, psi, lambda, far_init, center, hw);

        VerificationRow row;
        row.index = static_cast<int>(i);
        row.lambda = lambda;
        row.recovered = near.value <= far.value ? near.argmin : far.argmin;
        row.dist_near = (near.argmin - x).norm();
        row.dist_far = (far.argmin - x).norm();
        row.pass = row.dist_near <= tol && row.dist_far <= tol;
        rep.max_distance = std::max({rep.max_distance, row.dist_near, row.dist_far});
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

Vec ridge_closed_form(const Mat& A, const Vec& b, double lambda) {
    Mat M = A.transpose() * A + 2.0 * lambda * Mat::Identity(A.cols(), A.cols());
    return M.ldlt().solve(A.transpose() * b);
}

std::vector<Vec> ridge_solution_path(const Mat& A, const Vec& b,
                                     const std::vector<double>& lambdas) {
    std::vector<Vec> pts;
    pts.reserve(lambdas.size());
    for (double l : lambdas) pts.push_back(ridge_closed_form(A, b, l));
    return pts;
}

SearchPath discretize_continuous(const ContinuousPath& rho, const SubgradientOracle& f,
                                 double eps) {
    if (!rho.sampler) throw ConfigError("continuous path has no sampler");
    if (!(eps > 0.0)) throw ConfigError("discretization eps must be positive");
    const long cap = 100000;
    long m = 1;
    if (rho.lipschitz_hint && *rho.lipschitz_hint > 0.0)
        m = std::clamp(static_cast<long>(std::ceil(*rho.lipschitz_hint / eps)), 1L, cap);

    const int S = 16;
    while (true) {
        bool ok = true;
        for (long j = 0; j < m && ok; ++j) {
            std::array<Vec2, S + 1> pts;
            for (int s = 0; s <= S; ++s) {
                double t = (static_cast<double>(j) + static_cast<double>(s) / S) / m;
                pts[static_cast<std::size_t>(s)] = rho.sampler(std::min(t, 1.0));
            }
            double diam = 0.0;
            for (int u = 0; u <= S; ++u)
                for (int v = u + 1; v <= S; ++v)
                    diam = std::max(diam, (pts[static_cast<std::size_t>(u)] -
                                           pts[static_cast<std::size_t>(v)])
                                              .norm());
            if (diam > eps * (1.0 + 1e-12)) ok = false;
        }
        if (ok) break;
        m *= 2;
        if (m > cap)
            throw DomainError("discretization would exceed the sub-interval cap; eps too small");
    }

    std::vector<Vec> knots;
    knots.reserve(static_cast<std::size_t>(m) + 1);
    for (long j = 0; j <= m; ++j)
        knots.push_back(to_n(rho.sampler(static_cast<double>(j) / m)));
    SearchPath path = ingest_path(knots, f, "discretized");
    return path;
}

ApproxResult approximate_continuous(const ContinuousPath& rho, const SubgradientOracle& f,
                                    double eps, double verify_tol, std::uint64_t seed) {
    ApproxResult out;
    out.path = discretize_continuous(rho, f, eps);
    PathGroups groups = group_by_value(out.path, 0.0);
    AdmissibilityReport rep = check_admissibility(out.path, groups);
    if (!rep.admissible)
        throw BuildError("discretized path is not admissible: " + rep.reason);
    BuildResult built = build_penalty(out.path, groups, rep);
    out.model = built.model;
    out.schedule = extract_lambdas(out.model, out.path, groups, f);
    out.verification = verify_schedule(out.path, f, out.model, out.schedule, verify_tol, seed);

    // Dense sweep: every point of the continuous path must sit near the recovered
    // argmin of the sub-interval it falls in (right knot carries the weight).
    const long m = static_cast<long>(out.path.size()) - 1;
    double worst = 0.0;
    if (m >= 1) {
        const int D = 20;
        for (long j = 1; j <= m; ++j) {
            const Vec2 rec = out.verification.rows[static_cast<std::size_t>(j)].recovered;
            for (int s = 1; s <= D; ++s) {
                double t = (static_cast<double>(j - 1) + static_cast<double>(s) / D) / m;
                worst = std::max(worst, (rho.sampler(std::min(t, 1.0)) - rec).norm());
            }
        }
        worst = std::max(worst,
                         (rho.sampler(0.0) - out.verification.rows[0].recovered).norm());
    }
    out.dense_max_dist = worst;
    return out;
}

}  // namespace pforge

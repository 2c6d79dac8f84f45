#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "pforge/penalty_builder.hpp"

namespace pforge {

struct MinimizeResult {
    Vec2 argmin = Vec2::Zero();
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    double simplex_diameter = 0.0;
    std::vector<double> stage_values;  // incumbent after each grid stage, then final
};

struct VerificationRow {
    int index = 0;
    double lambda = 0.0;
    Vec2 recovered = Vec2::Zero();
    double dist_near = 0.0;
    double dist_far = 0.0;
    bool pass = false;
};

struct VerificationReport {
    double tolerance = 0.0;
    double max_distance = 0.0;
    bool all_pass = false;
    std::vector<VerificationRow> rows;
};

struct ContinuousPath {
    std::function<Vec2(double)> sampler;            // t in [0, 1]
    std::optional<double> lipschitz_hint;           // used to seed the knot count
};

struct ApproxResult {
    SearchPath path;
    PenaltyModel model;
    LambdaSchedule schedule;
    VerificationReport verification;
    double dense_max_dist = 0.0;  // max over dense t-samples of |rho(t) - recovered knot|
};

using Objective2d = std::function<double(const Vec2&)>;

// Nelder–Mead with a final coordinate polish; converged means the simplex collapsed
// below tol_diam. Deterministic.
MinimizeResult nelder_mead(const Objective2d& obj, const Vec2& start, double scale,
                           double tol_diam = 1e-8, int max_iter = 600);

// Derivative-free minimizer for f + lambda*psi: three shrinking 64x64 grid stages over
// bbox (shrink factor 8) followed by simplex refinement. Throws DomainError when the
// first-stage incumbent sits on the bbox boundary (box too small).
MinimizeResult minimize_penalized(const SubgradientOracle& f, const Objective2d& penalty,
                                  double lambda, const Vec2& x_init, const Vec2& bbox_center,
                                  double bbox_half_width);
MinimizeResult minimize_penalized(const SubgradientOracle& f, const PenaltyEvaluator& psi,
                                  double lambda, const Vec2& x_init, const Vec2& bbox_center,
                                  double bbox_half_width);

// For every path point, minimize f + lambda_i * psi from a near init (the point itself)
// and a far init (anchor plus a seeded random offset); both must land within tol.
VerificationReport verify_schedule(const SearchPath& path, const SubgradientOracle& f,
                                   const PenaltyModel& model, const LambdaSchedule& schedule,
                                   double tol, std::uint64_t seed = 0);

// argmin of 0.5*|Ax-b|^2 + lambda*|x|^2, by the normal equations.
Vec ridge_closed_form(const Mat& A, const Vec& b, double lambda);

// Exact penalized points for a decreasing lambda ladder; a ready-made admissible path.
std::vector<Vec> ridge_solution_path(const Mat& A, const Vec& b,
                                     const std::vector<double>& lambdas);

// Knots of a uniform grid on [0,1], doubled until every sub-interval's sampled image has
// diameter <= eps. Caps at m = 1e5 sub-intervals.
SearchPath discretize_continuous(const ContinuousPath& rho, const SubgradientOracle& f,
                                 double eps);

// discretize -> group -> check -> build -> extract -> verify, then compare dense samples
// of rho against the recovered argmin of their sub-interval's knot.
ApproxResult approximate_continuous(const ContinuousPath& rho, const SubgradientOracle& f,
                                    double eps, double verify_tol = 1e-2,
                                    std::uint64_t seed = 0);

}  // namespace pforge

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "pforge/errors.hpp"

namespace pforge {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Loss families the oracle factory understands.
//   quadratic:        f(x) = 0.5 * |A x - b|^2
//   shifted_quadratic f(x) = 0.5 * |x - c|^2
//   logistic:         f(w) = sum_i log(1 + exp(-y_i <x_i, w>)), rows of `data` are [x..., y]
//   custom_tabulated: f(x) = max_i (<g_i, x> + o_i), rows of `data` are [g..., o];
//                     subgradients come from central finite differences.
struct LossSpec {
    enum class Kind { quadratic, shifted_quadratic, logistic, custom_tabulated };
    Kind kind = Kind::shifted_quadratic;
    int dim = 0;
    Mat A;
    Vec b;
    Vec c;
    Mat data;
};

// A convex loss presented through value / one deterministic subgradient / domain test.
struct SubgradientOracle {
    int dim = 0;
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> subgrad;
    std::function<bool(const Vec&)> in_domain;
};

SubgradientOracle make_oracle(const LossSpec& spec);

// H+(x, g) = { y : <g, y - x> >= 0 }.  A zero subgradient degenerates to all of R^n.
struct Halfspace {
    Vec anchor;
    Vec normal;
    bool degenerate = false;

    bool membership(const Vec& y) const {
        if (degenerate) return true;
        return normal.dot(y - anchor) >= 0.0;
    }
};

Halfspace halfspace_plus(const Vec& x, const Vec& g);

// Distance of y to the bounding hyperplane, positive inside H+.
// Throws DomainError for degenerate halfspaces (no hyperplane to measure from).
double signed_margin(const Halfspace& h, const Vec& y);

}  // namespace pforge

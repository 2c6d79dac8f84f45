#include "pforge/convex_core.hpp"

#include <cmath>

namespace pforge {

namespace {

void require_dim(const Vec& x, int dim, const char* who) {
    if (x.size() != dim) throw DomainError(std::string(who) + ": dimension mismatch");
    if (!x.allFinite()) throw DomainError(std::string(who) + ": non-finite point");
}

double logistic_loss(const Mat& data, const Vec& w) {
    double f = 0.0;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const double y = data(r, data.cols() - 1);
        const double t = -y * data.row(r).head(data.cols() - 1).dot(w);
        // log(1 + e^t) without overflow
        f += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    return f;
}

Vec logistic_grad(const Mat& data, const Vec& w) {
    Vec g = Vec::Zero(w.size());
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const double y = data(r, data.cols() - 1);
        const Vec xi = data.row(r).head(data.cols() - 1).transpose();
        const double t = -y * xi.dot(w);
        const double sig = 1.0 / (1.0 + std::exp(-t));
        g += -y * sig * xi;
    }
    return g;
}

double max_affine(const Mat& data, const Vec& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < data.rows(); ++r)
        best = std::max(best, data.row(r).head(data.cols() - 1).dot(x) + data(r, data.cols() - 1));
    return best;
}

}  // namespace

SubgradientOracle make_oracle(const LossSpec& spec) {
    SubgradientOracle o;
    o.dim = spec.dim;
    o.in_domain = [](const Vec& x) { return x.allFinite(); };

    switch (spec.kind) {
        case LossSpec::Kind::quadratic: {
            if (spec.A.cols() != spec.dim || spec.A.rows() != spec.b.size())
                throw ConfigError("quadratic loss: A/b shapes inconsistent");
            const Mat A = spec.A;
            const Vec b = spec.b;
            const int dim = spec.dim;
            o.eval = [A, b, dim](const Vec& x) {
                require_dim(x, dim, "quadratic eval");
                return 0.5 * (A * x - b).squaredNorm();
            };
            o.subgrad = [A, b, dim](const Vec& x) {
                require_dim(x, dim, "quadratic subgrad");
                return Vec(A.transpose() * (A * x - b));
            };
            break;
        }
        case LossSpec::Kind::shifted_quadratic: {
            if (spec.c.size() != spec.dim)
                throw ConfigError("shifted-quadratic loss: c has wrong dimension");
            const Vec c = spec.c;
            const int dim = spec.dim;
            o.eval = [c, dim](const Vec& x) {
                require_dim(x, dim, "shifted-quadratic eval");
                return 0.5 * (x - c).squaredNorm();
            };
            o.subgrad = [c, dim](const Vec& x) {
                require_dim(x, dim, "shifted-quadratic subgrad");
                return Vec(x - c);
            };
            break;
        }
        case LossSpec::Kind::logistic: {
            if (spec.data.cols() != spec.dim + 1 || spec.data.rows() == 0)
                throw ConfigError("logistic loss: data rows must be [x..., y]");
            const Mat data = spec.data;
            const int dim = spec.dim;
            o.eval = [data, dim](const Vec& x) {
                require_dim(x, dim, "logistic eval");
                return logistic_loss(data, x);
            };
            o.subgrad = [data, dim](const Vec& x) {
                require_dim(x, dim, "logistic subgrad");
                return logistic_grad(data, x);
            };
            break;
        }
        case LossSpec::Kind::custom_tabulated: {
            if (spec.data.cols() != spec.dim + 1 || spec.data.rows() == 0)
                throw ConfigError("custom-tabulated loss: data rows must be [g..., offset]");
            const Mat data = spec.data;
            const int dim = spec.dim;
            o.eval = [data, dim](const Vec& x) {
                require_dim(x, dim, "custom-tabulated eval");
                return max_affine(data, x);
            };
            // One deterministic element: central differences, step scaled by the point.
            o.subgrad = [data, dim](const Vec& x) {
                require_dim(x, dim, "custom-tabulated subgrad");
                const double h = 1e-6 * (1.0 + x.norm());
                Vec g(dim);
                for (int k = 0; k < dim; ++k) {
                    Vec xp = x, xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    g[k] = (max_affine(data, xp) - max_affine(data, xm)) / (2.0 * h);
                }
                return g;
            };
            break;
        }
    }
    return o;
}

Halfspace halfspace_plus(const Vec& x, const Vec& g) {
    if (!x.allFinite() || !g.allFinite()) throw DomainError("halfspace_plus: non-finite input");
    Halfspace h;
    h.anchor = x;
    h.normal = g;
    h.degenerate = (g.norm() == 0.0);
    return h;
}

double signed_margin(const Halfspace& h, const Vec& y) {
    if (h.degenerate) throw DomainError("signed_margin: degenerate halfspace has no boundary");
    return h.normal.dot(y - h.anchor) / h.normal.norm();
}

}  // namespace pforge

#include "pforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pforge/errors.hpp"

namespace pforge {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

struct View {
    Vec2 lo, hi;
    double scale = 1.0;
    int size_px = 0;
    Vec2 to_px(const Vec2& w) const {
        return Vec2((w.x() - lo.x()) * scale, (hi.y() - w.y()) * scale);
    }
};

}  // namespace

std::vector<std::array<Vec2, 2>> iso_segments(const std::function<double(const Vec2&)>& field,
                                              double level, const Vec2& lo, const Vec2& hi,
                                              int grid) {
    if (grid < 2) throw ConfigError("iso grid must be at least 2");
    const int n = grid;
    std::vector<double> vals(static_cast<std::size_t>(n) * n);
    auto at = [&](int i, int j) -> double& {
        return vals[static_cast<std::size_t>(j) * n + i];
    };
    auto px = [&](int i) { return lo.x() + (hi.x() - lo.x()) * i / (n - 1); };
    auto py = [&](int j) { return lo.y() + (hi.y() - lo.y()) * j / (n - 1); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) at(i, j) = field(Vec2(px(i), py(j))) - level;

    auto lerp = [&](double xa, double ya, double va, double xb, double yb, double vb) {
        double t = va / (va - vb);
        t = std::clamp(t, 0.0, 1.0);
        return Vec2(xa + t * (xb - xa), ya + t * (yb - ya));
    };

    std::vector<std::array<Vec2, 2>> segs;
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            double v00 = at(i, j), v10 = at(i + 1, j);
            double v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
            int code = (v00 > 0 ? 1 : 0) | (v10 > 0 ? 2 : 0) | (v11 > 0 ? 4 : 0) |
                       (v01 > 0 ? 8 : 0);
            if (code == 0 || code == 15) continue;
            double x0 = px(i), x1 = px(i + 1), y0 = py(j), y1 = py(j + 1);
            Vec2 bottom = lerp(x0, y0, v00, x1, y0, v10);
            Vec2 right = lerp(x1, y0, v10, x1, y1, v11);
            Vec2 top = lerp(x0, y1, v01, x1, y1, v11);
            Vec2 left = lerp(x0, y0, v00, x0, y1, v01);
            auto add = [&](const Vec2& a, const Vec2& b) { segs.push_back({a, b}); };
            switch (code) {
                case 1: case 14: add(left, bottom); break;
                case 2: case 13: add(bottom, right); break;
                case 3: case 12: add(left, right); break;
                case 4: case 11: add(right, top); break;
                case 6: case 9: add(bottom, top); break;
                case 7: case 8: add(left, top); break;
                case 5: case 10: {
                    // saddle: split by the cell-center sign
                    double c = 0.25 * (v00 + v10 + v01 + v11);
                    bool flip = (code == 5) == (c > 0);
                    if (flip) {
                        add(left, top);
                        add(bottom, right);
                    } else {
                        add(left, bottom);
                        add(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segs;
}

std::string render_scene(const PenaltyModel& model, const SearchPath& path,
                         const SceneOptions& opt) {
    if (path.dim() != 2) throw ConfigError("scene rendering is planar");
    PenaltyEvaluator psi(model);

    Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
    auto grow = [&](const Vec2& p) {
        lo = Vec2(std::min(lo.x(), p.x()), std::min(lo.y(), p.y()));
        hi = Vec2(std::max(hi.x(), p.x()), std::max(hi.y(), p.y()));
    };
    for (const auto& s : model.shells)
        for (const Vec2& v : s.polygon.v) grow(v);
    for (const Vec& p : path.points) grow(Vec2(p(0), p(1)));
    grow(model.anchor);
    Vec2 span = hi - lo;
    double extent = std::max({span.x(), span.y(), 1e-9});
    Vec2 mid = 0.5 * (lo + hi);
    double half = 0.5 * extent * (1.0 + 2.0 * opt.pad);
    lo = mid - Vec2(half, half);
    hi = mid + Vec2(half, half);

    View view;
    view.lo = lo;
    view.hi = hi;
    view.size_px = opt.size_px;
    view.scale = opt.size_px / (2.0 * half);

    std::vector<double> levels = opt.iso_levels;
    if (levels.empty()) {
        levels.push_back(0.5 * model.shells.front().level);
        for (std::size_t j = 0; j + 1 < model.shells.size(); ++j)
            levels.push_back(0.5 * (model.shells[j].level + model.shells[j + 1].level));
        double c_out = model.shells.back().level;
        levels.push_back(c_out + 0.25 * (c_out - model.outer_apex_level));
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size_px
        << "\" height=\"" << opt.size_px << "\" viewBox=\"0 0 " << opt.size_px << " "
        << opt.size_px << "\">\n";
    svg << "<rect width=\"" << opt.size_px << "\" height=\"" << opt.size_px
        << "\" fill=\"#ffffff\"/>\n";

    std::function<double(const Vec2&)> field = [&psi](const Vec2& p) { return psi(p); };
    for (double level : levels) {
        auto segs = iso_segments(field, level, lo, hi, opt.grid);
        if (segs.empty()) continue;
        svg << "<path stroke=\"#b8cbe0\" stroke-width=\"1\" fill=\"none\" d=\"";
        for (const auto& s : segs) {
            Vec2 a = view.to_px(s[0]), b = view.to_px(s[1]);
            svg << "M" << num(a.x()) << " " << num(a.y()) << "L" << num(b.x()) << " "
                << num(b.y());
        }
        svg << "\"/>\n";
    }

    for (const auto& s : model.shells) {
        svg << "<polygon fill=\"none\" stroke=\"#2c6e49\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const Vec2& v : s.polygon.v) {
            Vec2 p = view.to_px(v);
            if (!first) svg << " ";
            svg << num(p.x()) << "," << num(p.y());
            first = false;
        }
        svg << "\"/>\n";
    }

    if (path.size() > 1) {
        svg << "<polyline fill=\"none\" stroke=\"#c1121f\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < path.size(); ++i) {
            Vec2 p = view.to_px(Vec2(path.points[i](0), path.points[i](1)));
            if (i) svg << " ";
            svg << num(p.x()) << "," << num(p.y());
        }
        svg << "\"/>\n";
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
        Vec2 p = view.to_px(Vec2(path.points[i](0), path.points[i](1)));
        svg << "<circle cx=\"" << num(p.x()) << "\" cy=\"" << num(p.y())
            << "\" r=\"3.5\" fill=\"#c1121f\"/>\n";
    }

    Vec2 a = view.to_px(model.anchor);
    svg << "<path stroke=\"#1d3557\" stroke-width=\"2\" d=\"M" << num(a.x() - 5) << " "
        << num(a.y() - 5) << "L" << num(a.x() + 5) << " " << num(a.y() + 5) << "M"
        << num(a.x() - 5) << " " << num(a.y() + 5) << "L" << num(a.x() + 5) << " "
        << num(a.y() - 5) << "\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace pforge

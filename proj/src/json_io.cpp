#include "pforge/json_io.hpp"

#include <fstream>

#include "pforge/errors.hpp"

namespace pforge {

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& j) {
    Vec v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j) v(i++) = x.get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    if (j.empty()) return Mat(0, 0);
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    Eigen::Index r = 0;
    for (const auto& row : j) {
        if (static_cast<Eigen::Index>(row.size()) != m.cols())
            throw ConfigError("ragged matrix in JSON");
        Eigen::Index c = 0;
        for (const auto& x : row) m(r, c++) = x.get<double>();
        ++r;
    }
    return m;
}

json vec2_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 vec2_from_json(const json& j) {
    if (j.size() != 2) throw ConfigError("expected a 2-vector");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

json polygon_to_json(const ConvexPolygon& p) {
    json a = json::array();
    for (const Vec2& v : p.v) a.push_back(vec2_to_json(v));
    return a;
}

ConvexPolygon polygon_from_json(const json& j) {
    std::vector<Vec2> pts;
    for (const auto& v : j) pts.push_back(vec2_from_json(v));
    return convex_hull(pts);
}

const char* kind_name(LossSpec::Kind k) {
    switch (k) {
        case LossSpec::Kind::quadratic: return "quadratic";
        case LossSpec::Kind::shifted_quadratic: return "shifted_quadratic";
        case LossSpec::Kind::logistic: return "logistic";
        case LossSpec::Kind::custom_tabulated: return "custom_tabulated";
    }
    throw ConfigError("unknown loss kind");
}

LossSpec::Kind kind_from_name(const std::string& s) {
    if (s == "quadratic") return LossSpec::Kind::quadratic;
    if (s == "shifted_quadratic") return LossSpec::Kind::shifted_quadratic;
    if (s == "logistic") return LossSpec::Kind::logistic;
    if (s == "custom_tabulated") return LossSpec::Kind::custom_tabulated;
    throw ConfigError("unknown loss kind: " + s);
}

const char* method_name(LambdaSchedule::Method m) {
    switch (m) {
        case LambdaSchedule::Method::ratio: return "ratio";
        case LambdaSchedule::Method::line_search: return "line_search";
        case LambdaSchedule::Method::joint_minimizer: return "joint_minimizer";
    }
    throw ConfigError("unknown lambda method");
}

LambdaSchedule::Method method_from_name(const std::string& s) {
    if (s == "ratio") return LambdaSchedule::Method::ratio;
    if (s == "line_search") return LambdaSchedule::Method::line_search;
    if (s == "joint_minimizer") return LambdaSchedule::Method::joint_minimizer;
    throw ConfigError("unknown lambda method: " + s);
}

}  // namespace

json loss_to_json(const LossSpec& spec) {
    json j;
    j["kind"] = kind_name(spec.kind);
    j["dim"] = spec.dim;
    if (spec.A.size() > 0) j["A"] = mat_to_json(spec.A);
    if (spec.b.size() > 0) j["b"] = vec_to_json(spec.b);
    if (spec.c.size() > 0) j["c"] = vec_to_json(spec.c);
    if (spec.data.size() > 0) j["data"] = mat_to_json(spec.data);
    return j;
}

LossSpec loss_from_json(const json& j) {
    try {
        LossSpec spec;
        spec.kind = kind_from_name(j.at("kind").get<std::string>());
        spec.dim = j.at("dim").get<int>();
        if (j.contains("A")) spec.A = mat_from_json(j["A"]);
        if (j.contains("b")) spec.b = vec_from_json(j["b"]);
        if (j.contains("c")) spec.c = vec_from_json(j["c"]);
        if (j.contains("data")) spec.data = mat_from_json(j["data"]);
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed loss JSON: ") + e.what());
    }
}

json path_to_json(const SearchPath& path) {
    json j;
    j["source"] = path.source;
    json pts = json::array(), fs = json::array(), gs = json::array();
    for (std::size_t i = 0; i < path.size(); ++i) {
        pts.push_back(vec_to_json(path.points[i]));
        fs.push_back(path.f_values[i]);
        gs.push_back(vec_to_json(path.subgradients[i]));
    }
    j["points"] = pts;
    j["f_values"] = fs;
    j["subgradients"] = gs;
    return j;
}

SearchPath path_from_json(const json& j) {
    SearchPath p;
    try {
        p.source = j.value("source", std::string("file"));
        for (const auto& x : j.at("points")) p.points.push_back(vec_from_json(x));
        for (const auto& x : j.at("f_values")) p.f_values.push_back(x.get<double>());
        for (const auto& x : j.at("subgradients")) p.subgradients.push_back(vec_from_json(x));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed path JSON: ") + e.what());
    }
    if (p.points.size() != p.f_values.size() || p.points.size() != p.subgradients.size())
        throw ConfigError("path arrays disagree in length");
    if (p.points.empty()) throw ConfigError("path is empty");
    return p;
}

json admissibility_to_json(const AdmissibilityReport& report, const PathGroups& groups) {
    json j;
    j["admissible"] = report.admissible;
    j["reason"] = report.reason;
    j["groups"] = groups.groups;
    j["group_values"] = groups.means;

    json vi = json::array();
    for (const auto& v : report.cond_i)
        vi.push_back({{"i", v.i}, {"j", v.j}, {"margin", v.margin}});
    j["cond_i"] = {{"ok", report.cond_i.empty()}, {"violations", vi}};

    bool ii_ok = true;
    json gi = json::array();
    for (const auto& r : report.cond_ii) {
        ii_ok = ii_ok && r.ok;
        gi.push_back({{"group", r.group},
                      {"max_angle", r.max_angle},
                      {"max_offset", r.max_offset},
                      {"mixed_degenerate", r.mixed_degenerate},
                      {"ok", r.ok}});
    }
    j["cond_ii"] = {{"ok", ii_ok}, {"groups", gi}};

    json ci;
    ci["feasible"] = report.cond_iii.feasible;
    if (report.cond_iii.feasible) {
        ci["witness"] = vec_to_json(report.cond_iii.witness);
        ci["radius"] = report.cond_iii.radius;
    }
    if (report.cond_iii.certificate) {
        ci["certificate"] = {{"i", report.cond_iii.certificate->i},
                             {"j", report.cond_iii.certificate->j},
                             {"joint_radius", report.cond_iii.certificate->joint_radius}};
    }
    j["cond_iii"] = ci;
    return j;
}

json region_to_json(const UltimateRegion& region) {
    return {{"vertices", polygon_to_json(region.polygon)},
            {"center", vec2_to_json(region.center)},
            {"radius", region.radius}};
}

json model_to_json(const PenaltyModel& model) {
    json j;
    j["anchor"] = vec2_to_json(model.anchor);
    j["anchor_level"] = model.anchor_level;
    j["outer_apex_level"] = model.outer_apex_level;
    json shells = json::array();
    for (const auto& s : model.shells)
        shells.push_back({{"vertices", polygon_to_json(s.polygon)}, {"level", s.level}});
    j["shells"] = shells;
    return j;
}

PenaltyModel model_from_json(const json& j) {
    PenaltyModel m;
    try {
        m.anchor = vec2_from_json(j.at("anchor"));
        m.anchor_level = j.value("anchor_level", 0.0);
        m.outer_apex_level = j.at("outer_apex_level").get<double>();
        for (const auto& s : j.at("shells"))
            m.shells.push_back(
                LeveledBody{polygon_from_json(s.at("vertices")), s.at("level").get<double>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed penalty JSON: ") + e.what());
    }
    if (m.shells.empty()) throw ConfigError("penalty model has no shells");
    return m;
}

json schedule_to_json(const LambdaSchedule& schedule) {
    json j;
    j["lambdas"] = schedule.lambdas;
    json ms = json::array();
    for (auto m : schedule.methods) ms.push_back(method_name(m));
    j["methods"] = ms;
    return j;
}

LambdaSchedule schedule_from_json(const json& j) {
    LambdaSchedule s;
    try {
        for (const auto& x : j.at("lambdas")) s.lambdas.push_back(x.get<double>());
        if (j.contains("methods")) {
            for (const auto& x : j["methods"])
                s.methods.push_back(method_from_name(x.get<std::string>()));
        } else {
            s.methods.assign(s.lambdas.size(), LambdaSchedule::Method::ratio);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed schedule JSON: ") + e.what());
    }
    if (s.methods.size() != s.lambdas.size())
        throw ConfigError("schedule arrays disagree in length");
    return s;
}

json certificates_to_json(const std::vector<TangencyCertificate>& certs) {
    json a = json::array();
    for (const auto& c : certs)
        a.push_back({{"point", c.point},
                     {"shell", c.shell},
                     {"boundary_dist", c.boundary_dist},
                     {"normal_residual", c.normal_residual},
                     {"joint_minimizer", c.joint_minimizer}});
    return a;
}

json verification_to_json(const VerificationReport& report) {
    json j;
    j["tolerance"] = report.tolerance;
    j["max_distance"] = report.max_distance;
    j["all_pass"] = report.all_pass;
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"index", r.index},
                        {"lambda", r.lambda},
                        {"recovered", vec2_to_json(r.recovered)},
                        {"dist_near", r.dist_near},
                        {"dist_far", r.dist_far},
                        {"pass", r.pass}});
    j["rows"] = rows;
    return j;
}

void write_json_file(const std::string& file, const json& j) {
    std::ofstream out(file);
    if (!out) throw ConfigError("cannot write " + file);
    out << j.dump(2) << "\n";
}

json read_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read " + file);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("bad JSON in " + file + ": " + e.what());
    }
}

}  // namespace pforge

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pforge/errors.hpp"
#include "pforge/json_io.hpp"
#include "pforge/pathkit.hpp"
#include "pforge/penalty_builder.hpp"
#include "pforge/scene.hpp"
#include "pforge/verifier.hpp"

namespace py = pybind11;
using namespace pforge;

// The module speaks JSON strings; the python package wraps them into dicts. Keeps the
// binding surface small while exposing every pipeline operation.

namespace {

json path_with_loss(const SearchPath& path, const LossSpec& loss) {
    json j = path_to_json(path);
    j["loss"] = loss_to_json(loss);
    return j;
}

std::pair<SearchPath, SubgradientOracle> parse_path(const std::string& s) {
    json j = json::parse(s);
    SearchPath path = path_from_json(j);
    if (!j.contains("loss")) throw ConfigError("path JSON carries no loss spec");
    return {path, make_oracle(loss_from_json(j["loss"]))};
}

std::string py_gradient_descent(const std::string& loss_json, const std::vector<double>& x0,
                                double step, int iters) {
    LossSpec loss = loss_from_json(json::parse(loss_json));
    SubgradientOracle f = make_oracle(loss);
    Vec v(static_cast<Eigen::Index>(x0.size()));
    for (std::size_t i = 0; i < x0.size(); ++i) v(static_cast<Eigen::Index>(i)) = x0[i];
    return path_with_loss(run_gradient_descent(f, v, step, iters), loss).dump();
}

std::string py_ingest(const std::string& loss_json,
                      const std::vector<std::vector<double>>& points) {
    LossSpec loss = loss_from_json(json::parse(loss_json));
    SubgradientOracle f = make_oracle(loss);
    std::vector<Vec> pts;
    for (const auto& row : points) {
        Vec v(static_cast<Eigen::Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) v(static_cast<Eigen::Index>(i)) = row[i];
        pts.push_back(v);
    }
    return path_with_loss(ingest_path(pts, f, "python"), loss).dump();
}

std::string py_check(const std::string& path_json, double group_tol) {
    SearchPath path = path_from_json(json::parse(path_json));
    try {
        PathGroups groups = group_by_value(path, group_tol);
        AdmissibilityReport rep = check_admissibility(path, groups);
        json j = admissibility_to_json(rep, groups);
        if (rep.admissible) j["ultimate_region"] = region_to_json(ultimate_region(path, default_bbox(path)));
        return j.dump();
    } catch (const GroupingError& e) {
        json j;
        j["admissible"] = false;
        j["reason"] = e.what();
        j["offending"] = e.offending;
        return j.dump();
    }
}

std::string py_build(const std::string& path_json, double group_tol) {
    auto [path, oracle] = parse_path(path_json);
    PathGroups groups = group_by_value(path, group_tol);
    AdmissibilityReport rep = check_admissibility(path, groups);
    BuildResult built = build_penalty(path, groups, rep);
    LambdaSchedule schedule = extract_lambdas(built.model, path, groups, oracle);
    json j = model_to_json(built.model);
    j["schedule"] = schedule_to_json(schedule);
    j["certificates"] = certificates_to_json(built.certificates);
    return j.dump();
}

std::string py_verify(const std::string& path_json, const std::string& penalty_json,
                      double tol, std::uint64_t seed) {
    auto [path, oracle] = parse_path(path_json);
    json pj = json::parse(penalty_json);
    PenaltyModel model = model_from_json(pj);
    LambdaSchedule schedule = schedule_from_json(pj.at("schedule"));
    return verification_to_json(verify_schedule(path, oracle, model, schedule, tol, seed))
        .dump();
}

double py_eval_penalty(const std::string& penalty_json, double x, double y) {
    PenaltyModel model = model_from_json(json::parse(penalty_json));
    return eval_penalty(model, Vec2(x, y));
}

std::string py_render(const std::string& path_json, const std::string& penalty_json) {
    SearchPath path = path_from_json(json::parse(path_json));
    PenaltyModel model = model_from_json(json::parse(penalty_json));
    return render_scene(model, path);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "search-path certification and penalty synthesis";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<GroupingError>(m, "GroupingError");
    py::register_exception<BuildError>(m, "BuildError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<GeometryError>(m, "GeometryError");
    py::register_exception<DivergenceError>(m, "DivergenceError");

    m.def("gradient_descent_path", &py_gradient_descent, py::arg("loss_json"), py::arg("x0"),
          py::arg("step"), py::arg("iters"),
          "run gradient descent on a loss spec; returns path JSON");
    m.def("ingest_path", &py_ingest, py::arg("loss_json"), py::arg("points"),
          "wrap external iterates into a path JSON with values and subgradients");
    m.def("check_path", &py_check, py::arg("path_json"), py::arg("group_tol") = 0.0,
          "admissibility report JSON for a path");
    m.def("build_penalty", &py_build, py::arg("path_json"), py::arg("group_tol") = 0.0,
          "construct the penalty and lambda schedule; returns penalty JSON");
    m.def("verify_schedule", &py_verify, py::arg("path_json"), py::arg("penalty_json"),
          py::arg("tol") = 1e-2, py::arg("seed") = 0,
          "re-minimize f + lambda_i * psi and report recovery distances");
    m.def("eval_penalty", &py_eval_penalty, py::arg("penalty_json"), py::arg("x"),
          py::arg("y"), "evaluate the penalty surface at a point");
    m.def("render_scene", &py_render, py::arg("path_json"), py::arg("penalty_json"),
          "deterministic SVG of shells, path and iso-lines");
}

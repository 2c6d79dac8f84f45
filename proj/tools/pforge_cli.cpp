#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pforge/errors.hpp"
#include "pforge/json_io.hpp"
#include "pforge/pathkit.hpp"
#include "pforge/penalty_builder.hpp"
#include "pforge/scene.hpp"
#include "pforge/verifier.hpp"

namespace fs = std::filesystem;
using namespace pforge;

namespace {

enum class LogLevel { debug = 0, info, warn, error };

LogLevel g_log_level = [] {
    const char* env = std::getenv("PENALTY_FORGE_LOG");
    if (!env) return LogLevel::warn;
    std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    if (s == "error") return LogLevel::error;
    return LogLevel::warn;
}();

void log(LogLevel lvl, const std::string& msg) {
    if (lvl < g_log_level) return;
    static const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << "[pforge:" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInadmissible = 2;
constexpr int kExitVerifyFail = 3;
constexpr int kExitBuildFail = 4;

struct LoadedPath {
    SearchPath path;
    LossSpec loss;
    SubgradientOracle oracle;
};

void sort_by_value(SearchPath& p) {
    std::vector<std::size_t> order(p.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p.f_values[a] > p.f_values[b];
    });
    SearchPath q = p;
    for (std::size_t i = 0; i < order.size(); ++i) {
        q.points[i] = p.points[order[i]];
        q.f_values[i] = p.f_values[order[i]];
        q.subgradients[i] = p.subgradients[order[i]];
    }
    p = std::move(q);
}

LoadedPath load_path_file(const std::string& file, bool sort) {
    json j = read_json_file(file);
    LoadedPath out;
    out.path = path_from_json(j);
    if (!j.contains("loss")) throw ConfigError(file + " carries no loss spec");
    out.loss = loss_from_json(j["loss"]);
    out.oracle = make_oracle(out.loss);
    if (sort) sort_by_value(out.path);
    return out;
}

void write_path_artifact(const fs::path& file, const SearchPath& path, const LossSpec& loss) {
    json j = path_to_json(path);
    j["loss"] = loss_to_json(loss);
    write_json_file(file.string(), j);
}

// Grouping + admissibility; writes admissibility.json and returns the verdict pieces.
struct CheckOutcome {
    PathGroups groups;
    AdmissibilityReport report;
    bool grouping_failed = false;
};

CheckOutcome run_check(const SearchPath& path, double group_tol, const fs::path& out_dir) {
    CheckOutcome out;
    try {
        out.groups = group_by_value(path, group_tol);
    } catch (const GroupingError& e) {
        out.grouping_failed = true;
        json j;
        j["admissible"] = false;
        std::string msg = e.what();
        msg += " (indices:";
        json idx = json::array();
        for (int i : e.offending) {
            idx.push_back(i);
            msg += " " + std::to_string(i);
        }
        msg += ")";
        j["reason"] = msg;
        j["offending"] = idx;
        write_json_file((out_dir / "admissibility.json").string(), j);
        std::cout << "inadmissible: " << msg << "\n";
        return out;
    }
    out.report = check_admissibility(path, out.groups);
    json j = admissibility_to_json(out.report, out.groups);
    if (out.report.admissible) {
        try {
            UltimateRegion region = ultimate_region(path, default_bbox(path));
            j["ultimate_region"] = region_to_json(region);
        } catch (const std::exception& e) {
            log(LogLevel::warn, std::string("ultimate region skipped: ") + e.what());
        }
    }
    write_json_file((out_dir / "admissibility.json").string(), j);
    std::cout << (out.report.admissible ? "admissible" : "inadmissible: " + out.report.reason)
              << "\n";
    return out;
}

SearchPath path_from_config(const json& cfg, const SubgradientOracle& oracle,
                            const LossSpec& loss) {
    const json& pc = cfg.at("path");
    if (pc.contains("file")) {
        LoadedPath lp = load_path_file(pc["file"].get<std::string>(), false);
        return lp.path;
    }
    if (pc.contains("points")) {
        std::vector<Vec> pts;
        for (const auto& row : pc["points"]) {
            Vec v(static_cast<Eigen::Index>(row.size()));
            Eigen::Index k = 0;
            for (const auto& x : row) v(k++) = x.get<double>();
            pts.push_back(v);
        }
        return ingest_path(pts, oracle, "config");
    }
    std::string algo = pc.value("algorithm", std::string("gradient_descent"));
    if (algo != "gradient_descent")
        throw ConfigError("unknown path algorithm: " + algo);
    Vec x0(loss.dim);
    {
        const auto& arr = pc.at("x0");
        if (static_cast<int>(arr.size()) != loss.dim)
            throw ConfigError("x0 has the wrong dimension");
        Eigen::Index k = 0;
        for (const auto& x : arr) x0(k++) = x.get<double>();
    }
    double step = pc.at("step").get<double>();
    int iters = pc.at("iters").get<int>();
    return run_gradient_descent(oracle, x0, step, iters);
}

int cmd_run(const std::string& config_file, std::optional<std::string> out_override,
            std::optional<std::uint64_t> seed_override, bool sort_flag,
            std::optional<double> tol_override) {
    json cfg = read_json_file(config_file);
    fs::path out_dir = out_override ? *out_override : cfg.value("out", std::string("."));
    fs::create_directories(out_dir);

    LossSpec loss = loss_from_json(cfg.at("loss"));
    SubgradientOracle oracle = make_oracle(loss);
    SearchPath path = path_from_config(cfg, oracle, loss);
    if (sort_flag || cfg.value("sort", false)) sort_by_value(path);
    write_path_artifact(out_dir / "path.json", path, loss);
    log(LogLevel::info, "path with " + std::to_string(path.size()) + " points written");

    double group_tol = cfg.value("group_tol", 0.0);
    CheckOutcome chk = run_check(path, group_tol, out_dir);
    if (chk.grouping_failed || !chk.report.admissible) return kExitInadmissible;

    BuildResult built = build_penalty(path, chk.groups, chk.report);
    LambdaSchedule schedule = extract_lambdas(built.model, path, chk.groups, oracle);
    json pj = model_to_json(built.model);
    pj["schedule"] = schedule_to_json(schedule);
    pj["certificates"] = certificates_to_json(built.certificates);
    write_json_file((out_dir / "penalty.json").string(), pj);
    log(LogLevel::info,
        "penalty with " + std::to_string(built.model.shells.size()) + " shells written");

    double tol = tol_override ? *tol_override : cfg.value("verify_tol", 1e-2);
    std::uint64_t seed = seed_override ? *seed_override : cfg.value("seed", 0ull);
    VerificationReport rep = verify_schedule(path, oracle, built.model, schedule, tol, seed);
    write_json_file((out_dir / "verification.json").string(), verification_to_json(rep));
    std::cout << (rep.all_pass ? "verified" : "verification failed") << ": max distance "
              << rep.max_distance << " (tol " << tol << ")\n";
    return rep.all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_check(const std::string& path_file, const std::string& out_dir, bool sort_flag,
              double group_tol) {
    json j = read_json_file(path_file);
    SearchPath path = path_from_json(j);
    if (sort_flag) sort_by_value(path);
    fs::create_directories(out_dir);
    CheckOutcome chk = run_check(path, group_tol, out_dir);
    return (!chk.grouping_failed && chk.report.admissible) ? kExitOk : kExitInadmissible;
}

int cmd_build(const std::string& path_file, const std::string& out_dir, bool sort_flag,
              double group_tol) {
    LoadedPath lp = load_path_file(path_file, sort_flag);
    fs::create_directories(out_dir);
    CheckOutcome chk = run_check(lp.path, group_tol, out_dir);
    if (chk.grouping_failed || !chk.report.admissible) return kExitInadmissible;
    BuildResult built = build_penalty(lp.path, chk.groups, chk.report);
    LambdaSchedule schedule = extract_lambdas(built.model, lp.path, chk.groups, lp.oracle);
    json pj = model_to_json(built.model);
    pj["schedule"] = schedule_to_json(schedule);
    pj["certificates"] = certificates_to_json(built.certificates);
    write_json_file((fs::path(out_dir) / "penalty.json").string(), pj);
    std::cout << "built " << built.model.shells.size() << " shells\n";
    return kExitOk;
}

int cmd_verify(const std::string& path_file, const std::string& penalty_file,
               const std::string& out_dir, std::optional<std::string> lambda_file, double tol,
               std::uint64_t seed) {
    LoadedPath lp = load_path_file(path_file, false);
    json pj = read_json_file(penalty_file);
    PenaltyModel model = model_from_json(pj);
    LambdaSchedule schedule;
    if (lambda_file) {
        json lj = read_json_file(*lambda_file);
        schedule = schedule_from_json(lj.is_array() ? json{{"lambdas", lj}} : lj);
    } else if (pj.contains("schedule")) {
        schedule = schedule_from_json(pj["schedule"]);
    } else {
        throw ConfigError("no lambda schedule in " + penalty_file + " and none supplied");
    }
    fs::create_directories(out_dir);
    VerificationReport rep = verify_schedule(lp.path, lp.oracle, model, schedule, tol, seed);
    write_json_file((fs::path(out_dir) / "verification.json").string(),
                    verification_to_json(rep));
    std::cout << (rep.all_pass ? "verified" : "verification failed") << ": max distance "
              << rep.max_distance << " (tol " << tol << ")\n";
    return rep.all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_plot(const std::string& path_file, const std::string& penalty_file,
             const std::string& out_file) {
    json j = read_json_file(path_file);
    SearchPath path = path_from_json(j);
    PenaltyModel model = model_from_json(read_json_file(penalty_file));
    std::string svg = render_scene(model, path);
    if (!out_file.empty() && out_file != "-") {
        if (fs::path(out_file).has_parent_path())
            fs::create_directories(fs::path(out_file).parent_path());
        std::ofstream out(out_file);
        if (!out) throw ConfigError("cannot write " + out_file);
        out << svg;
        std::cout << "wrote " << out_file << "\n";
    } else {
        std::cout << svg;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalty-forge: certify search paths and forge penalties that replay them"};
    app.require_subcommand(1);

    std::string config_file, path_file, penalty_file;
    std::string out_dir = ".";
    std::string plot_out = "scene.svg";
    std::optional<std::string> out_override, lambda_file;
    std::optional<std::uint64_t> seed_override;
    std::optional<double> tol_override;
    bool sort_flag = false;
    double group_tol = 0.0;
    double verify_tol = 1e-2;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "full pipeline from a config file");
    run->add_option("--config", config_file, "run config (JSON)")->required();
    run->add_option("--out", out_override, "artifact directory");
    run->add_option("--seed", seed_override, "verifier seed");
    run->add_option("--tol", tol_override, "verification tolerance");
    run->add_flag("--sort", sort_flag, "sort points by decreasing loss first");

    auto* check = app.add_subcommand("check", "admissibility of an existing path");
    check->add_option("--path", path_file, "path.json")->required();
    check->add_option("--out", out_dir, "artifact directory");
    check->add_option("--tol", group_tol, "grouping tolerance");
    check->add_flag("--sort", sort_flag, "sort points by decreasing loss first");

    auto* build = app.add_subcommand("build", "construct the penalty for an admissible path");
    build->add_option("--path", path_file, "path.json")->required();
    build->add_option("--out", out_dir, "artifact directory");
    build->add_option("--tol", group_tol, "grouping tolerance");
    build->add_flag("--sort", sort_flag, "sort points by decreasing loss first");

    auto* verify = app.add_subcommand("verify", "replay the path through the oracle");
    verify->add_option("--path", path_file, "path.json")->required();
    verify->add_option("--penalty", penalty_file, "penalty.json")->required();
    verify->add_option("--lambdas", lambda_file, "override schedule (JSON file)");
    verify->add_option("--out", out_dir, "artifact directory");
    verify->add_option("--tol", verify_tol, "verification tolerance");
    verify->add_option("--seed", seed, "far-init seed");

    auto* plot = app.add_subcommand("plot", "render the scene as SVG");
    plot->add_option("--path", path_file, "path.json")->required();
    plot->add_option("--penalty", penalty_file, "penalty.json")->required();
    plot->add_option("--out", plot_out, "output SVG file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_file, out_override, seed_override, sort_flag, tol_override);
        if (check->parsed()) return cmd_check(path_file, out_dir, sort_flag, group_tol);
        if (build->parsed()) return cmd_build(path_file, out_dir, sort_flag, group_tol);
        if (verify->parsed())
            return cmd_verify(path_file, penalty_file, out_dir, lambda_file, verify_tol, seed);
        if (plot->parsed()) return cmd_plot(path_file, penalty_file, plot_out);
    } catch (const BuildError& e) {
        log(LogLevel::error, e.what());
        std::cout << "build failed: " << e.what() << "\n";
        return kExitBuildFail;
    } catch (const GroupingError& e) {
        log(LogLevel::error, e.what());
        std::cout << "inadmissible: " << e.what() << "\n";
        return kExitInadmissible;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

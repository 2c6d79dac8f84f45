#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pforge/scene.hpp"

using namespace pforge;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

PenaltyModel box_model() {
    PenaltyModel m;
    m.anchor = Vec2(0, 0);
    m.shells.push_back(LeveledBody{
        convex_hull({Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)}), 0.0});
    m.shells.push_back(LeveledBody{
        convex_hull({Vec2(-3, -3), Vec2(3, -3), Vec2(3, 3), Vec2(-3, 3)}), 0.0});
    assign_levels(m);
    return m;
}

SearchPath tiny_path() {
    LossSpec spec;
    spec.kind = LossSpec::Kind::shifted_quadratic;
    spec.dim = 2;
    spec.c = v2(0, 0);
    return ingest_path({v2(-1, -1), v2(-0.5, -0.5)}, make_oracle(spec));
}

}  // namespace

TEST_CASE("marching squares traces the square gauge's level set") {
    auto field = [](const Vec2& p) { return std::max(std::abs(p.x()), std::abs(p.y())); };
    auto segs = iso_segments(field, 0.5, Vec2(-1, -1), Vec2(1, 1), 128);
    REQUIRE_FALSE(segs.empty());
    for (const auto& s : segs)
        for (const Vec2& e : s) {
            CHECK(field(e) == doctest::Approx(0.5).epsilon(0.03));
        }
    CHECK_THROWS_AS(iso_segments(field, 0.5, Vec2(-1, -1), Vec2(1, 1), 1), ConfigError);
}

TEST_CASE("scene SVG is well-formed and lists every element") {
    PenaltyModel m = box_model();
    SearchPath p = tiny_path();
    std::string svg = render_scene(m, p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    size_t polygons = 0, circles = 0, polylines = 0, pos = 0;
    while ((pos = svg.find("<polygon", pos)) != std::string::npos) ++polygons, ++pos;
    pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) ++circles, ++pos;
    pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) ++polylines, ++pos;
    CHECK(polygons == m.shells.size());
    CHECK(circles == p.size());
    CHECK(polylines == 1);
}

TEST_CASE("rendering is deterministic and matches the golden fixture") {
    PenaltyModel m = box_model();
    SearchPath p = tiny_path();
    std::string first = render_scene(m, p);
    std::string second = render_scene(m, p);
    CHECK(first == second);

    // ctest exports PFORGE_GOLDEN; fall back to the source tree layout so the
    // binary can also be run by hand from the build directory.
    const char* dir = std::getenv("PFORGE_GOLDEN");
    std::filesystem::path golden =
        (dir != nullptr ? std::filesystem::path(dir)
                        : std::filesystem::path("../tests/golden")) /
        "scene_boxes.svg";
    if (!std::filesystem::exists(golden))
        golden = std::filesystem::path("../../tests/golden/scene_boxes.svg");
    REQUIRE_MESSAGE(std::filesystem::exists(golden), "golden fixture missing");
    std::ifstream in(golden, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(first == buf.str());
}

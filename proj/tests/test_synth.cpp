#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "vasc/errors.hpp"
#include "vasc/raster.hpp"
#include "vasc/synth.hpp"

using namespace vasc;
using namespace vasc::synth;
using nlohmann::json;

namespace {

SceneSpec one_line(double hw, int w = 120, int h = 60) {
    return scene_from_json(json::parse(R"({"canvas":{"w":)" + std::to_string(w) + R"(,"h":)" + std::to_string(h) +
                                       R"(},"disc":{"cx":10,"cy":10,"d":8},
        "vessels":[{"kind":"line","params":{"x0":-5,"y0":30,"x1":130,"y1":30},"half_width":)" +
                                       std::to_string(hw) + R"(,"label":"artery"}]})"));
}

}  // namespace

TEST_CASE("scene spec round trip") {
    const auto spec = radial_fan();
    const auto back = scene_from_json(scene_to_json(spec));
    CHECK(scene_to_json(back) == scene_to_json(spec));
    CHECK_THROWS_AS(scene_from_json(json::parse(R"({"canvas":{"w":10}})")), InputError);
}

TEST_CASE("one horizontal line") {
    const auto scene = generate_scene(one_line(3.0));
    REQUIRE(scene.vessels.size() == 1);
    const auto& v = scene.vessels[0];
    CHECK(v.centerline.front().x == doctest::Approx(0.0).epsilon(0.01));
    CHECK(v.centerline.back().x <= 119.0);
    for (auto p : v.centerline) CHECK(p.y == 30.0);
    CHECK(v.true_tortuosity == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("half-width floor and overlaps are rejected") {
    CHECK_THROWS_AS(generate_scene(one_line(0.5)), InputError);
    auto spec = one_line(3.0);
    auto second = spec.vessels[0];
    second.params["y0"] = 34.0;
    second.params["y1"] = 34.0;
    spec.vessels.push_back(second);
    CHECK_THROWS_AS(generate_scene(spec), InputError);
    spec.vessels[1].params["y0"] = 45.0;
    spec.vessels[1].params["y1"] = 45.0;
    CHECK_NOTHROW(generate_scene(spec));
}

TEST_CASE("curve arc lengths") {
    SceneSpec spec;
    spec.width = spec.height = 400;
    VesselSpec arc;
    arc.kind = CurveKind::Arc;
    arc.params = {{"cx", 200}, {"cy", 200}, {"r", 100}, {"a0", 0}, {"a1", 90}};
    arc.half_width_start = arc.half_width_end = 2.0;
    VesselSpec s;
    s.kind = CurveKind::Sine;
    s.params = {{"x0", 20}, {"y0", 370}, {"x1", 380}, {"y1", 370}, {"amplitude", 8}, {"wavelength", 60}};
    s.half_width_start = s.half_width_end = 2.0;
    spec.vessels = {arc, s};
    const auto scene = generate_scene(spec);
    CHECK(scene.vessels[0].arc_length == doctest::Approx(50.0 * M_PI).epsilon(1e-9));
    CHECK(scene.vessels[1].arc_length == doctest::Approx(12.0 * oracle::sine_arc(8.0, 60.0, 0.0, 30.0)).epsilon(1e-7));
    CHECK(scene.vessels[1].true_tortuosity > 0.0);
}

TEST_CASE("rasterization") {
    SUBCASE("zero vessels") {
        SceneSpec spec;
        spec.width = 20;
        spec.height = 10;
        const auto r = rasterize(generate_scene(spec));
        CHECK(r.likelihood.values() == std::vector<std::uint8_t>(200, 0));
        CHECK(r.artery.values() == std::vector<std::uint8_t>(200, 0));
    }
    SUBCASE("per-column argmax is the centreline row") {
        const auto r = rasterize(generate_scene(one_line(4.0)));
        for (int x = 0; x < 120; ++x) {
            int arg = 0;
            for (int y = 0; y < 60; ++y)
                if (r.likelihood(x, y) > r.likelihood(x, arg)) arg = y;
            CHECK(arg == 30);
        }
        CHECK(r.artery(50, 30) == 230);
        CHECK(r.vein(50, 30) == 26);
        CHECK(r.artery(50, 50) == 0);
    }
    SUBCASE("distance at the centreline matches the crossing radius") {
        for (double h : {2.0, 3.0, 4.5, 6.0}) {
            const auto r = rasterize(generate_scene(one_line(h)));
            const auto mask = binarize(r.likelihood, 100);
            const double rt = crossing_radius(h, 100.0);
            // The first background pixel lies past the crossing, at most a pixel out.
            const double dt = distance_transform(mask)(60, 30);
            CHECK(dt > rt);
            CHECK(dt <= rt + 1.0);
            CHECK(std::abs(boundary_distance(mask, 0.5)(60, 30) - rt) <= 0.6);
        }
        CHECK(crossing_radius(1.0, 100.0) == doctest::Approx(0.684).epsilon(1e-3));
    }
    SUBCASE("noise is seeded") {
        auto spec = one_line(3.0);
        spec.noise_sigma = 5.0;
        spec.seed = 9;
        const auto a = rasterize(generate_scene(spec));
        const auto b = rasterize(generate_scene(spec));
        CHECK(a.likelihood == b.likelihood);
        spec.seed = 10;
        CHECK_FALSE(rasterize(generate_scene(spec)).likelihood == a.likelihood);
    }
}

TEST_CASE("presets") {
    const auto fan = generate_scene(radial_fan());
    int arteries = 0;
    const Annulus a = Annulus::around(fan.disc, 1.0, 1.5);
    for (const auto& v : fan.vessels) {
        arteries += v.label == VesselLabel::Artery;
        CHECK(std::hypot(v.centerline.front().x - a.center.x, v.centerline.front().y - a.center.y) < a.r_inner);
        CHECK(std::hypot(v.centerline.back().x - a.center.x, v.centerline.back().y - a.center.y) > a.r_outer);
    }
    CHECK(fan.vessels.size() == 12);
    CHECK(arteries == 6);

    CHECK(scene_to_json(random_tree(42)) == scene_to_json(random_tree(42)));
    CHECK_FALSE(scene_to_json(random_tree(42)) == scene_to_json(random_tree(43)));
    const auto t = generate_scene(random_tree(42));
    CHECK(rasterize(t).likelihood == rasterize(t).likelihood);
}

TEST_CASE("scene outputs") {
    const auto dir = std::filesystem::temp_directory_path() / "vasc_synth_out";
    std::filesystem::remove_all(dir);
    const auto scene = generate_scene(one_line(3.0));
    write_scene_outputs(scene, rasterize(scene), dir);
    for (const char* f : {"likelihood.png", "av_artery.png", "av_vein.png", "disc.json", "truth.json"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
}

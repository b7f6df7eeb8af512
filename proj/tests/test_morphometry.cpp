#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vasc/morphometry.hpp"

using namespace vasc;

namespace {

VesselSegment segment(const std::vector<Pixel>& path, int a, int b, VesselLabel label = VesselLabel::Unknown) {
    VesselSegment s;
    s.node_ids = {a, b};
    s.path = path;
    s.label = label;
    s.update_lengths();
    return s;
}

std::vector<Pixel> ray(Point c, double angle, double r0, double r1) {
    std::vector<Pixel> out;
    for (double r = r0; r <= r1; r += 0.25) {
        const Pixel p{static_cast<int>(std::lround(c.x + r * std::cos(angle))), static_cast<int>(std::lround(c.y + r * std::sin(angle)))};
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    return out;
}

int add_node(VesselGraph& g, Pixel p, NodeKind k) {
    g.nodes.push_back({p, k});
    return static_cast<int>(g.nodes.size()) - 1;
}

}  // namespace

TEST_CASE("segment width") {
    std::vector<Pixel> path;
    for (int x = 0; x < 21; ++x) path.push_back({x, 5});

    SUBCASE("constant field") {
        const auto w = segment_width(path, ScalarField(21, 11, 3.0));
        REQUIRE(w);
        CHECK(w->width == 6.0);
        CHECK(w->usable);
    }
    SUBCASE("width step at the midpoint") {
        ScalarField f(21, 11, 2.0);
        for (int x = 10; x < 21; ++x) f(x, 5) = 4.0;
        const auto w = segment_width(path, f);
        REQUIRE(w);
        // Arc positions 5, 10, 15 land on pixels 5, 10, 15: half-widths 2, 4, 4.
        CHECK(w->width == doctest::Approx(2.0 * (2.0 + 4.0 + 4.0) / 3.0));
        CHECK(w->width >= 6.0);
        CHECK(w->width <= 6.67);
    }
    SUBCASE("off the mask") {
        const auto w = segment_width(path, ScalarField(21, 11, 0.0));
        REQUIRE(w);
        CHECK(w->width == 0.0);
        CHECK_FALSE(w->usable);
    }
    SUBCASE("too short") {
        const std::vector<Pixel> p3{{0, 0}, {1, 0}, {2, 0}};
        CHECK_FALSE(segment_width(p3, ScalarField(3, 1, 1.0)));
    }
}

TEST_CASE("annulus subgraph") {
    const DiscGeometry disc{100, 100, 40};
    const Annulus a = Annulus::around(disc, 1.0, 1.5);
    CHECK(a.r_inner == 40.0);
    CHECK(a.r_outer == 60.0);

    SUBCASE("radial vessel is kept and clipped") {
        VesselGraph g;
        g.width = g.height = 200;
        const auto path = ray({100, 100}, 0.3, 20, 90);
        add_node(g, path.front(), NodeKind::End);
        add_node(g, path.back(), NodeKind::End);
        g.segments.push_back(segment(path, 0, 1));
        const auto sub = annulus_subgraph(g, a);
        REQUIRE(sub.graph.segments.size() == 1);
        for (auto p : sub.graph.segments[0].path) CHECK(a.contains(p));
        // 20 px of radius; the 8-step arc runs a little longer than the chord.
        CHECK(sub.graph.segments[0].chord < 21.5);
        CHECK(sub.graph.segments[0].chord > 18.0);
        CHECK(sub.graph.segments[0].arc >= sub.graph.segments[0].chord);
    }
    SUBCASE("short arc inside touching neither circle is dropped") {
        VesselGraph g;
        g.width = g.height = 200;
        std::vector<Pixel> arc;
        for (double t = 0.0; t < 0.5; t += 0.01) {
            const Pixel p{static_cast<int>(std::lround(100 + 50 * std::cos(t))), static_cast<int>(std::lround(100 + 50 * std::sin(t)))};
            if (arc.empty() || !(arc.back() == p)) arc.push_back(p);
        }
        add_node(g, arc.front(), NodeKind::End);
        add_node(g, arc.back(), NodeKind::End);
        g.segments.push_back(segment(arc, 0, 1));
        CHECK(annulus_subgraph(g, a).graph.segments.empty());
    }
    SUBCASE("touching only the inner circle is dropped") {
        VesselGraph g;
        g.width = g.height = 200;
        const auto path = ray({100, 100}, 1.0, 20, 50);
        add_node(g, path.front(), NodeKind::End);
        add_node(g, path.back(), NodeKind::End);
        g.segments.push_back(segment(path, 0, 1));
        CHECK(annulus_subgraph(g, a).graph.segments.empty());
    }
    SUBCASE("annulus outside the image") {
        VesselGraph g;
        g.width = g.height = 200;
        const auto sub = annulus_subgraph(g, Annulus{{1000, 1000}, 10, 20});
        CHECK(sub.graph.segments.empty());
        CHECK_FALSE(sub.warnings.empty());
    }
}

TEST_CASE("routing") {
    const DiscGeometry disc{100, 100, 40};
    const Annulus a = Annulus::around(disc, 1.0, 1.5);

    SUBCASE("single crossing vessel") {
        VesselGraph g;
        g.width = g.height = 200;
        const auto path = ray({100, 100}, 2.0, 20, 90);
        add_node(g, path.front(), NodeKind::End);
        add_node(g, path.back(), NodeKind::End);
        g.segments.push_back(segment(path, 0, 1, VesselLabel::Vein));
        const auto paths = route_vessels(annulus_subgraph(g, a));
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].label == VesselLabel::Vein);
    }
    SUBCASE("Y with the stem on the inner circle gives two edge-disjoint paths") {
        VesselGraph g;
        g.width = g.height = 200;
        // Stem along +x from r=30 to r=50, arms fanning out to r=80.
        std::vector<Pixel> stem;
        for (int x = 130; x <= 150; ++x) stem.push_back({x, 100});
        std::vector<Pixel> up{{150, 100}}, down{{150, 100}};
        for (int k = 1; k <= 30; ++k) {
            up.push_back({150 + k, 100 - k / 3});
            down.push_back({150 + k, 100 + k / 2});
        }
        const int s0 = add_node(g, stem.front(), NodeKind::End);
        const int b = add_node(g, stem.back(), NodeKind::Branch);
        const int u = add_node(g, up.back(), NodeKind::End);
        const int d = add_node(g, down.back(), NodeKind::End);
        g.segments.push_back(segment(stem, s0, b, VesselLabel::Artery));
        g.segments.push_back(segment(up, b, u, VesselLabel::Artery));
        g.segments.push_back(segment(down, b, d, VesselLabel::Artery));
        const auto sub = annulus_subgraph(g, a);
        const auto paths = route_vessels(sub);
        REQUIRE(paths.size() == 2);
        std::set<int> seen;
        for (const auto& p : paths)
            for (int s : p.segments) CHECK(seen.insert(s).second);
        CHECK(seen.size() == sub.graph.segments.size());
    }
    SUBCASE("in and out of the inner circle only") {
        VesselGraph g;
        g.width = g.height = 200;
        std::vector<Pixel> arc;
        for (double t = -0.6; t <= 0.6; t += 0.005) {
            const double r = 45.0 - 30.0 * t * t;
            const Pixel p{static_cast<int>(std::lround(100 + r * std::cos(t))), static_cast<int>(std::lround(100 + r * std::sin(t)))};
            if (arc.empty() || !(arc.back() == p)) arc.push_back(p);
        }
        add_node(g, arc.front(), NodeKind::End);
        add_node(g, arc.back(), NodeKind::End);
        g.segments.push_back(segment(arc, 0, 1));
        CHECK(route_vessels(annulus_subgraph(g, a)).empty());
    }
}

TEST_CASE("top k by label") {
    std::vector<WidthSample> s;
    for (int w = 2; w <= 9; ++w) s.push_back({w, double(w), VesselLabel::Artery});
    for (int w = 1; w <= 3; ++w) s.push_back({20 + w, double(w), VesselLabel::Vein});
    s.push_back({40, 50.0, VesselLabel::Unknown});
    const auto t = top_k_by_label(s);
    CHECK(t.arteries == std::vector<double>{9, 8, 7, 6, 5, 4});
    CHECK(t.veins == std::vector<double>{3, 2, 1});

    std::vector<WidthSample> unknown{{0, 4.0, VesselLabel::Unknown}};
    const auto e = top_k_by_label(unknown);
    CHECK(e.arteries.empty());
    CHECK(e.veins.empty());
    CHECK_FALSE(compute_avr(e.arteries, e.veins));
}

TEST_CASE("knudtson") {
    const std::vector<double> two{4, 3};
    CHECK(knudtson_equivalent(two, 0.88) == doctest::Approx(4.4).epsilon(1e-15));
    const std::vector<double> one{7.5};
    CHECK(knudtson_equivalent(one, 0.88) == 7.5);
    CHECK_THROWS(knudtson_equivalent(std::vector<double>{}, 0.88));

    const std::vector<double> six(6, 10.0);
    // Three rounds: 6 -> 3 -> 2 -> 1.
    const double r1 = 0.88 * std::sqrt(200.0);
    const double r2 = 0.88 * std::sqrt(2 * r1 * r1);
    const double r3 = 0.88 * std::sqrt(r2 * r2 + r1 * r1);
    CHECK(knudtson_equivalent(six, 0.88) == doctest::Approx(r3).epsilon(1e-14));
    CHECK(oracle::knudtson(six, 0.88) == doctest::Approx(r3).epsilon(1e-14));
}

TEST_CASE("knudtson is monotone in every width") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> width(1.0, 20.0);
    for (int k = 0; k < 300; ++k) {
        std::vector<double> w(1 + k % 6);
        for (auto& x : w) x = width(rng);
        const double base = knudtson_equivalent(w, 0.95);
        auto bumped = w;
        bumped[k % w.size()] += 0.5;
        CHECK(knudtson_equivalent(bumped, 0.95) >= base - 1e-12);
    }
}

TEST_CASE("avr") {
    const std::vector<double> a{4, 3}, v{5, 4};
    const auto r = compute_avr(a, v);
    REQUIRE(r);
    CHECK(r->crae == doctest::Approx(4.4));
    CHECK(r->crve == doctest::Approx(0.95 * std::sqrt(41.0)));
    CHECK(r->avr == doctest::Approx(4.4 / (0.95 * std::sqrt(41.0))).epsilon(1e-14));
    CHECK(r->avr == doctest::Approx(0.72333).epsilon(1e-5));

    const std::vector<double> single{5.0};
    // A lone width is its own equivalent on either side.
    CHECK(compute_avr(single, single)->avr == 1.0);

    // Swapping lists swaps the roles, with p fixed per side.
    const auto s = compute_avr(v, a);
    CHECK(s->crae == doctest::Approx(0.88 * std::sqrt(41.0)));
    CHECK(s->crve == doctest::Approx(0.95 * 5.0));

    // Truncation to min(|A|, |V|, 6).
    const std::vector<double> many{9, 8, 7, 6, 5, 4, 3, 2};
    const std::vector<double> few{6, 5, 4};
    const auto t = compute_avr(many, few);
    CHECK(t->count == 3);
    CHECK(t->crae == doctest::Approx(oracle::knudtson({9, 8, 7}, 0.88)));
}

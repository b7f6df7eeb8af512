#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vasc/tortuosity.hpp"

using namespace vasc;

namespace {

std::vector<Point> sine(double amplitude, double wavelength, double length, double dx = 0.5) {
    std::vector<Point> p;
    const double k = 2.0 * M_PI / wavelength;
    for (double x = 0.0; x <= length + 1e-9; x += dx) p.push_back({x, amplitude * std::sin(k * x)});
    return p;
}

// Expected T_g of a sine split exactly at its inflections.
double analytic_sine_tg(double a, double lambda, int half_waves, LcMode mode) {
    const double arc = oracle::sine_arc(a, lambda, 0.0, lambda / 2.0);
    const double term = arc / (lambda / 2.0) - 1.0;
    const double lc = mode == LcMode::Chord ? half_waves * lambda / 2.0 : half_waves * arc;
    return (half_waves - 1) / lc * half_waves * term;
}

std::vector<Pixel> raster_line(Pixel a, Pixel b) {
    std::vector<Pixel> out;
    const int n = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    for (int i = 0; i <= n; ++i) {
        out.push_back({a.x + static_cast<int>(std::lround(double(b.x - a.x) * i / n)),
                       a.y + static_cast<int>(std::lround(double(b.y - a.y) * i / n))});
    }
    return out;
}

}  // namespace

TEST_CASE("curvature split") {
    SUBCASE("straight line stays whole") {
        std::vector<Point> line;
        for (int i = 0; i < 60; ++i) line.push_back({double(i), 0.5 * i});
        CHECK(curvature_split(line).size() == 1);
    }
    SUBCASE("one sine period splits near the half period") {
        std::vector<Point> p;
        for (int i = 0; i < 100; ++i) p.push_back({double(i), 10.0 * std::sin(2.0 * M_PI * i / 99.0)});
        const auto parts = curvature_split(p, 5);
        REQUIRE(parts.size() == 2);
        CHECK(std::abs(static_cast<double>(parts[0].last) - 49.5) <= 5.0);
    }
    SUBCASE("circular arc stays whole") {
        std::vector<Point> p;
        for (int i = 0; i < 80; ++i) p.push_back({40.0 * std::cos(i * 0.02), 40.0 * std::sin(i * 0.02)});
        CHECK(curvature_split(p).size() == 1);
    }
    SUBCASE("short path stays whole") {
        const auto p = sine(5.0, 6.0, 4.0);
        CHECK(curvature_split(p, 5).size() == 1);
    }
    SUBCASE("partition is contiguous and covering") {
        const auto p = sine(6.0, 40.0, 200.0);
        const auto parts = curvature_split(p);
        REQUIRE(parts.size() == 10);
        CHECK(parts.front().first == 0);
        CHECK(parts.back().last == p.size() - 1);
        for (std::size_t i = 1; i < parts.size(); ++i) CHECK(parts[i].first == parts[i - 1].last);
    }
}

TEST_CASE("grisan tortuosity") {
    SUBCASE("straight path with any partition") {
        std::vector<Point> line;
        for (int i = 0; i < 30; ++i) line.push_back({2.0 * i, -1.0 * i});
        const std::vector<SubPath> parts{{0, 7}, {7, 20}, {20, 29}};
        CHECK(grisan_tortuosity(line, parts).value == 0.0);
    }
    SUBCASE("one part scores zero") {
        const auto p = sine(8.0, 30.0, 90.0);
        const std::vector<SubPath> whole{{0, p.size() - 1}};
        CHECK(grisan_tortuosity(p, whole).value == 0.0);
    }
    SUBCASE("hand-computed two-part value") {
        // Two right-angle bends: each part has arc 2, chord sqrt 2.
        const std::vector<Point> p{{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}};
        const std::vector<SubPath> parts{{0, 2}, {2, 4}};
        const double term = 2.0 / std::sqrt(2.0) - 1.0;
        CHECK(grisan_tortuosity(p, parts, LcMode::Chord).value == doctest::Approx(2.0 * term / std::sqrt(8.0)));
        CHECK(grisan_tortuosity(p, parts, LcMode::Arc).value == doctest::Approx(2.0 * term / 4.0));
    }
    SUBCASE("closed sub-path is excluded") {
        const std::vector<Point> p{{0, 0}, {1, 0}, {1, 1}, {0, 0}, {3, 0}, {4, 1}, {5, 0}};
        const std::vector<SubPath> parts{{0, 3}, {3, 5}, {5, 6}};
        const auto g = grisan_tortuosity(p, parts);
        CHECK(g.excluded == 1);
        CHECK(g.parts == 2);
    }
    SUBCASE("matches the quadrature oracle on sines") {
        for (double a : {2.0, 4.0, 8.0}) {
            const auto p = sine(a, 60.0, 240.0, 0.05);
            const auto parts = curvature_split(p, 5);
            REQUIRE(parts.size() == 8);
            for (LcMode mode : {LcMode::Chord, LcMode::Arc}) {
                const double expect = analytic_sine_tg(a, 60.0, 8, mode);
                CHECK(grisan_tortuosity(p, parts, mode).value == doctest::Approx(expect).epsilon(1e-3));
            }
        }
    }
}

TEST_CASE("normalization") {
    CHECK(normalize_tortuosity(0.0, 0.3) == 0.0);
    CHECK(normalize_tortuosity(0.3, 0.3) == 0.5);
    CHECK(normalize_tortuosity(0.2, 1.0) < normalize_tortuosity(0.21, 1.0));
    CHECK_THROWS(normalize_tortuosity(0.1, 0.0));
}

TEST_CASE("tortuosity report") {
    const Annulus zone{{0.0, 0.0}, 50.0, 400.0};
    auto make_graph = [](std::vector<std::vector<Pixel>> paths) {
        VesselGraph g;
        g.width = g.height = 500;
        for (auto& p : paths) {
            VesselSegment s;
            g.nodes.push_back({p.front(), NodeKind::End});
            g.nodes.push_back({p.back(), NodeKind::End});
            s.node_ids = {static_cast<int>(g.nodes.size()) - 2, static_cast<int>(g.nodes.size()) - 1};
            s.path = std::move(p);
            s.update_lengths();
            g.segments.push_back(std::move(s));
        }
        return g;
    };

    SUBCASE("15-pixel segment is skipped") {
        const auto r = tortuosity_report(make_graph({raster_line({100, 100}, {114, 100})}), zone);
        CHECK(r.records.empty());
    }
    SUBCASE("straight 50-pixel vessel") {
        const auto r = tortuosity_report(make_graph({raster_line({100, 100}, {149, 100})}), zone);
        REQUIRE(r.records.size() == 1);
        CHECK(r.records[0].t_g == 0.0);
        CHECK(r.records[0].t_norm == 0.0);
    }
    SUBCASE("a sine vessel outranks a straight one") {
        std::vector<Pixel> wave;
        for (int x = 100; x < 300; ++x) {
            const Pixel p{x, 250 + static_cast<int>(std::lround(12.0 * std::sin(2.0 * M_PI * (x - 100) / 70.0)))};
            while (!wave.empty() && std::abs(wave.back().y - p.y) > 1) {
                wave.push_back({wave.back().x, wave.back().y + (p.y > wave.back().y ? 1 : -1)});
            }
            wave.push_back(p);
        }
        const auto r = tortuosity_report(make_graph({raster_line({100, 100}, {300, 100}), wave}), zone);
        REQUIRE(r.records.size() == 2);
        CHECK(r.records[1].t_g > r.records[0].t_g);
        CHECK(r.records[1].t_norm > r.records[0].t_norm);
        CHECK(r.records[1].n_subsegments >= 4);
    }
    SUBCASE("empty zone") {
        const auto r = tortuosity_report(make_graph({raster_line({100, 100}, {149, 100})}), Annulus{{0, 0}, 1000, 2000});
        CHECK(r.records.empty());
        CHECK_FALSE(r.warnings.empty());
    }
}

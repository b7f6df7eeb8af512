#include "vasc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "vasc/errors.hpp"
#include "vasc/image_io.hpp"

namespace vasc::synth {

using nlohmann::json;

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// =============================================================================
// Scene description
// =============================================================================

namespace {

CurveKind parse_kind(const std::string& s) {
    if (s == "line") return CurveKind::Line;
    if (s == "arc") return CurveKind::Arc;
    if (s == "sine") return CurveKind::Sine;
    if (s == "bezier") return CurveKind::Bezier;
    throw InputError("unknown curve kind: " + s);
}

std::string kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Line: return "line";
        case CurveKind::Arc: return "arc";
        case CurveKind::Sine: return "sine";
        case CurveKind::Bezier: return "bezier";
    }
    return "line";
}

}  // namespace

SceneSpec scene_from_json(const json& doc) {
    SceneSpec spec;
    try {
        spec.width = doc.at("canvas").at("w").get<int>();
        spec.height = doc.at("canvas").at("h").get<int>();
        const auto& d = doc.at("disc");
        spec.disc = {d.at("cx").get<double>(), d.at("cy").get<double>(), d.at("d").get<double>()};
        spec.noise_sigma = doc.value("noise_sigma", 0.0);
        spec.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& v : doc.at("vessels")) {
            VesselSpec vs;
            vs.kind = parse_kind(v.at("kind").get<std::string>());
            vs.params = v.at("params");
            const auto& hw = v.at("half_width");
            if (hw.is_array()) {
                vs.half_width_start = hw.at(0).get<double>();
                vs.half_width_end = hw.at(1).get<double>();
            } else {
                vs.half_width_start = vs.half_width_end = hw.get<double>();
            }
            vs.label = parse_label(v.at("label").get<std::string>());
            vs.parent = v.value("parent", -1);
            spec.vessels.push_back(std::move(vs));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed scene description: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("malformed scene description: ") + e.what());
    }
    if (spec.width <= 0 || spec.height <= 0) throw InputError("canvas must be non-empty");
    return spec;
}

json scene_to_json(const SceneSpec& spec) {
    json vessels = json::array();
    for (const auto& v : spec.vessels) {
        json hw = v.half_width_start == v.half_width_end ? json(v.half_width_start)
                                                         : json::array({v.half_width_start, v.half_width_end});
        json entry{{"kind", kind_name(v.kind)}, {"params", v.params}, {"half_width", hw}, {"label", to_string(v.label)}};
        if (v.parent >= 0) entry["parent"] = v.parent;
        vessels.push_back(std::move(entry));
    }
    return {{"canvas", {{"w", spec.width}, {"h", spec.height}}},
            {"disc", {{"cx", spec.disc.cx}, {"cy", spec.disc.cy}, {"d", spec.disc.diameter}}},
            {"vessels", std::move(vessels)},
            {"noise_sigma", spec.noise_sigma},
            {"seed", spec.seed}};
}

// =============================================================================
// Curves
// =============================================================================

namespace {

struct Curve {
    std::function<Point(double)> at;
    std::function<Point(double)> velocity;
};

double p(const json& params, const char* key, double fallback = std::numeric_limits<double>::quiet_NaN()) {
    if (!params.contains(key)) {
        if (std::isnan(fallback)) throw InputError(std::string("missing curve parameter: ") + key);
        return fallback;
    }
    return params.at(key).get<double>();
}

Curve make_curve(const VesselSpec& v) {
    const json& q = v.params;
    switch (v.kind) {
        case CurveKind::Line: {
            const Point a{p(q, "x0"), p(q, "y0")};
            const Point b{p(q, "x1"), p(q, "y1")};
            return {[=](double t) { return Point{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; },
                    [=](double) { return Point{b.x - a.x, b.y - a.y}; }};
        }
        case CurveKind::Arc: {
            const double cx = p(q, "cx"), cy = p(q, "cy"), r = p(q, "r");
            const double a0 = p(q, "a0") * M_PI / 180.0, a1 = p(q, "a1") * M_PI / 180.0;
            return {[=](double t) {
                        const double a = a0 + t * (a1 - a0);
                        return Point{cx + r * std::cos(a), cy + r * std::sin(a)};
                    },
                    [=](double t) {
                        const double a = a0 + t * (a1 - a0);
                        return Point{-r * std::sin(a) * (a1 - a0), r * std::cos(a) * (a1 - a0)};
                    }};
        }
        case CurveKind::Sine: {
            const Point a{p(q, "x0"), p(q, "y0")};
            const Point b{p(q, "x1"), p(q, "y1")};
            const double amp = p(q, "amplitude"), lambda = p(q, "wavelength"), phase = p(q, "phase", 0.0);
            const double len = std::hypot(b.x - a.x, b.y - a.y);
            if (len <= 0.0 || lambda <= 0.0) throw InputError("sine needs a non-degenerate base and wavelength");
            const Point u{(b.x - a.x) / len, (b.y - a.y) / len};
            const Point n{-u.y, u.x};
            const double k = 2.0 * M_PI * len / lambda;
            return {[=](double t) {
                        const double off = amp * std::sin(k * t + phase);
                        return Point{a.x + t * len * u.x + off * n.x, a.y + t * len * u.y + off * n.y};
                    },
                    [=](double t) {
                        const double d = amp * k * std::cos(k * t + phase);
                        return Point{len * u.x + d * n.x, len * u.y + d * n.y};
                    }};
        }
        case CurveKind::Bezier: {
            const auto pts = q.at("points").get<std::vector<std::vector<double>>>();
            if (pts.size() != 4) throw InputError("bezier needs 4 control points");
            const Point c0{pts[0].at(0), pts[0].at(1)}, c1{pts[1].at(0), pts[1].at(1)};
            const Point c2{pts[2].at(0), pts[2].at(1)}, c3{pts[3].at(0), pts[3].at(1)};
            return {[=](double t) {
                        const double s = 1.0 - t;
                        const double b0 = s * s * s, b1 = 3 * s * s * t, b2 = 3 * s * t * t, b3 = t * t * t;
                        return Point{b0 * c0.x + b1 * c1.x + b2 * c2.x + b3 * c3.x,
                                     b0 * c0.y + b1 * c1.y + b2 * c2.y + b3 * c3.y};
                    },
                    [=](double t) {
                        const double s = 1.0 - t;
                        const double d0 = 3 * s * s, d1 = 6 * s * t, d2 = 3 * t * t;
                        return Point{d0 * (c1.x - c0.x) + d1 * (c2.x - c1.x) + d2 * (c3.x - c2.x),
                                     d0 * (c1.y - c0.y) + d1 * (c2.y - c1.y) + d2 * (c3.y - c2.y)};
                    }};
        }
    }
    throw InputError("unknown curve kind");
}

double speed(const Curve& c, double t) {
    const Point v = c.velocity(t);
    return std::hypot(v.x, v.y);
}

// Composite Simpson over [0,1].
double quadrature_length(const Curve& c, int intervals = 4096) {
    const double h = 1.0 / intervals;
    double sum = speed(c, 0.0) + speed(c, 1.0);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(c, i * h);
    return sum * h / 3.0;
}

bool inside_canvas(Point q, int w, int h) { return q.x >= 0.0 && q.y >= 0.0 && q.x <= w - 1.0 && q.y <= h - 1.0; }

double segment_distance(Point q, Point a, Point b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(q.x - (a.x + t * dx), q.y - (a.y + t * dy));
}

}  // namespace

double distance_to_polyline(Point q, const std::vector<Point>& line) {
    if (line.empty()) return std::numeric_limits<double>::infinity();
    if (line.size() == 1) return std::hypot(q.x - line[0].x, q.y - line[0].y);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.size(); ++i) best = std::min(best, segment_distance(q, line[i - 1], line[i]));
    return best;
}

Scene generate_scene(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) throw InputError("canvas must be non-empty");
    Scene scene;
    scene.width = spec.width;
    scene.height = spec.height;
    scene.disc = spec.disc;
    scene.noise_sigma = spec.noise_sigma;
    scene.seed = spec.seed;

    for (const auto& v : spec.vessels) {
        if (v.half_width_start <= 0.5 || v.half_width_end <= 0.5) {
            throw InputError("vessel half-width must exceed 0.5 px");
        }
        const Curve curve = make_curve(v);
        double max_speed = 0.0;
        for (int i = 0; i <= 1000; ++i) max_speed = std::max(max_speed, speed(curve, i / 1000.0));
        const int samples = static_cast<int>(std::ceil(max_speed / 0.25)) + 1;

        SyntheticVessel sv;
        sv.half_width_start = v.half_width_start;
        sv.half_width_end = v.half_width_end;
        sv.label = v.label;
        sv.parent = v.parent;
        sv.arc_length = quadrature_length(curve);
        const Point a = curve.at(0.0), b = curve.at(1.0);
        sv.chord_length = std::hypot(b.x - a.x, b.y - a.y);
        sv.true_tortuosity = sv.chord_length > 0.0 ? sv.arc_length / sv.chord_length - 1.0 : 0.0;

        // Longest run of samples inside the canvas.
        std::vector<Point> run, best;
        for (int i = 0; i < samples; ++i) {
            const Point q = curve.at(static_cast<double>(i) / (samples - 1));
            if (inside_canvas(q, spec.width, spec.height)) {
                run.push_back(q);
            } else {
                if (run.size() > best.size()) best = run;
                run.clear();
            }
        }
        if (run.size() > best.size()) best = run;
        sv.centerline = std::move(best);
        scene.vessels.push_back(std::move(sv));
    }

    // Overlap check on ~1 px subsamples.
    auto related = [&](std::size_t i, std::size_t j) {
        const int pi = scene.vessels[i].parent, pj = scene.vessels[j].parent;
        return pi == static_cast<int>(j) || pj == static_cast<int>(i) || (pi >= 0 && pi == pj);
    };
    for (std::size_t i = 0; i < scene.vessels.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.vessels.size(); ++j) {
            if (related(i, j)) continue;
            const auto& vi = scene.vessels[i];
            const auto& vj = scene.vessels[j];
            const double limit = std::max(vi.half_width_start, vi.half_width_end) +
                                 std::max(vj.half_width_start, vj.half_width_end);
            for (std::size_t a = 0; a < vi.centerline.size(); a += 4) {
                for (std::size_t b = 0; b < vj.centerline.size(); b += 4) {
                    const double d = std::hypot(vi.centerline[a].x - vj.centerline[b].x,
                                                vi.centerline[a].y - vj.centerline[b].y);
                    if (d < limit) {
                        throw InputError("vessels " + std::to_string(i) + " and " + std::to_string(j) +
                                         " overlap");
                    }
                }
            }
        }
    }
    return scene;
}

// =============================================================================
// Rasterization
// =============================================================================

double crossing_radius(double half_width, double threshold) {
    const double sigma = half_width / 2.0;
    return sigma * std::sqrt(2.0 * std::log(255.0 / threshold));
}

RasterizedScene rasterize(const Scene& scene) {
    const int w = scene.width, h = scene.height;
    std::vector<double> level(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<int> owner(level.size(), -1);
    std::vector<double> owner_dist(level.size(), 0.0);
    std::vector<double> owner_hw(level.size(), 0.0);

    std::vector<double> best_d(level.size());
    std::vector<double> best_hw(level.size());
    for (std::size_t vi = 0; vi < scene.vessels.size(); ++vi) {
        const auto& v = scene.vessels[vi];
        if (v.centerline.empty()) continue;
        std::fill(best_d.begin(), best_d.end(), std::numeric_limits<double>::infinity());
        const double reach = 4.0 * std::max(v.half_width_start, v.half_width_end) + 2.0;

        // Arc fraction at every sample, for tapering.
        std::vector<double> frac(v.centerline.size(), 0.0);
        for (std::size_t k = 1; k < v.centerline.size(); ++k) {
            frac[k] = frac[k - 1] + std::hypot(v.centerline[k].x - v.centerline[k - 1].x,
                                               v.centerline[k].y - v.centerline[k - 1].y);
        }
        const double total = frac.back() > 0.0 ? frac.back() : 1.0;
        for (double& f : frac) f /= total;

        const std::size_t nseg = v.centerline.size() > 1 ? v.centerline.size() - 1 : 1;
        for (std::size_t k = 0; k < nseg; ++k) {
            const Point a = v.centerline[k];
            const Point b = v.centerline.size() > 1 ? v.centerline[k + 1] : a;
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len2 = dx * dx + dy * dy;
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    double t = len2 > 0.0 ? ((x - a.x) * dx + (y - a.y) * dy) / len2 : 0.0;
                    t = std::clamp(t, 0.0, 1.0);
                    const double d = std::hypot(x - (a.x + t * dx), y - (a.y + t * dy));
                    const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                    if (d < best_d[idx]) {
                        best_d[idx] = d;
                        const double f = v.centerline.size() > 1 ? frac[k] + t * (frac[k + 1] - frac[k]) : 0.0;
                        best_hw[idx] = v.half_width_at(f);
                    }
                }
            }
        }
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            if (!std::isfinite(best_d[idx])) continue;
            const double sigma = best_hw[idx] / 2.0;
            const double value = 255.0 * std::exp(-best_d[idx] * best_d[idx] / (2.0 * sigma * sigma));
            if (value > level[idx]) {
                level[idx] = value;
                owner[idx] = static_cast<int>(vi);
                owner_dist[idx] = best_d[idx];
                owner_hw[idx] = best_hw[idx];
            }
        }
    }

    RasterizedScene out{LikelihoodMap(w, h), LikelihoodMap(w, h), LikelihoodMap(w, h)};
    Rng rng(scene.seed);
    for (std::size_t idx = 0; idx < level.size(); ++idx) {
        double v = level[idx];
        if (scene.noise_sigma > 0.0) v += scene.noise_sigma * rng.normal();
        out.likelihood.values()[idx] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        if (owner[idx] >= 0 && owner_dist[idx] <= owner_hw[idx]) {
            const bool artery = scene.vessels[owner[idx]].label == VesselLabel::Artery;
            out.artery.values()[idx] = static_cast<std::uint8_t>(std::lround((artery ? 0.9 : 0.1) * 255.0));
            out.vein.values()[idx] = static_cast<std::uint8_t>(std::lround((artery ? 0.1 : 0.9) * 255.0));
        }
    }
    return out;
}

// =============================================================================
// Presets
// =============================================================================

SceneSpec radial_fan(const FanSpec& fan) {
    SceneSpec spec;
    spec.width = spec.height = fan.canvas;
    const double c = fan.canvas / 2.0;
    spec.disc = {c, c, fan.disc_diameter};
    const std::size_t n = fan.artery_half_widths.size() + fan.vein_half_widths.size();
    std::size_t ai = 0, vi = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const bool artery = (k % 2 == 0 && ai < fan.artery_half_widths.size()) || vi >= fan.vein_half_widths.size();
        const double angle = (static_cast<double>(k) + 0.5) * 2.0 * M_PI / static_cast<double>(n);
        const double r0 = fan.start_radius_multiple * fan.disc_diameter;
        const double r1 = fan.end_radius_multiple * fan.disc_diameter;
        VesselSpec v;
        v.kind = CurveKind::Line;
        v.params = {{"x0", c + r0 * std::cos(angle)}, {"y0", c + r0 * std::sin(angle)},
                    {"x1", c + r1 * std::cos(angle)}, {"y1", c + r1 * std::sin(angle)}};
        v.label = artery ? VesselLabel::Artery : VesselLabel::Vein;
        v.half_width_start = v.half_width_end = artery ? fan.artery_half_widths[ai++] : fan.vein_half_widths[vi++];
        spec.vessels.push_back(std::move(v));
    }
    return spec;
}

SceneSpec random_tree(std::uint64_t seed, int canvas, int depth) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        SceneSpec spec;
        spec.width = spec.height = canvas;
        spec.seed = seed;
        const double c = canvas / 2.0;
        spec.disc = {c, c, canvas / 8.0};
        const VesselLabel label = rng.uniform() < 0.5 ? VesselLabel::Artery : VesselLabel::Vein;

        struct Pending {
            Point start;
            double angle, length, half_width;
            int parent, level;
        };
        const double a0 = rng.uniform(0.0, 2.0 * M_PI);
        std::vector<Pending> queue{{{c + 0.5 * spec.disc.diameter * std::cos(a0), c + 0.5 * spec.disc.diameter * std::sin(a0)},
                                    a0, canvas * 0.22, rng.uniform(3.0, 4.5), -1, 0}};
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const Pending cur = queue[qi];
            const Point end{cur.start.x + cur.length * std::cos(cur.angle), cur.start.y + cur.length * std::sin(cur.angle)};
            VesselSpec v;
            v.kind = CurveKind::Line;
            v.params = {{"x0", cur.start.x}, {"y0", cur.start.y}, {"x1", end.x}, {"y1", end.y}};
            v.half_width_start = v.half_width_end = cur.half_width;
            v.label = label;
            v.parent = cur.parent;
            const int id = static_cast<int>(spec.vessels.size());
            spec.vessels.push_back(std::move(v));
            if (cur.level + 1 >= depth) continue;
            for (double side : {-1.0, 1.0}) {
                queue.push_back({end, cur.angle + side * rng.uniform(0.45, 0.8), cur.length * rng.uniform(0.6, 0.8),
                                 std::max(0.8 * cur.half_width, 1.0), id, cur.level + 1});
            }
        }
        try {
            generate_scene(spec);
            return spec;
        } catch (const InputError&) {
            continue;
        }
    }
    throw InputError("could not place a non-overlapping random tree");
}

// =============================================================================
// Output
// =============================================================================

void write_scene_outputs(const Scene& scene, const RasterizedScene& raster, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_png_gray(dir / "likelihood.png", scene.width, scene.height, raster.likelihood.values());
    write_png_gray(dir / "av_artery.png", scene.width, scene.height, raster.artery.values());
    write_png_gray(dir / "av_vein.png", scene.width, scene.height, raster.vein.values());
    {
        std::ofstream out(dir / "disc.json");
        out << json{{"cx", scene.disc.cx}, {"cy", scene.disc.cy}, {"d", scene.disc.diameter}}.dump(2) << '\n';
    }
    json vessels = json::array();
    for (const auto& v : scene.vessels) {
        vessels.push_back({{"label", to_string(v.label)},
                           {"half_width", {v.half_width_start, v.half_width_end}},
                           {"arc_length", v.arc_length},
                           {"chord_length", v.chord_length},
                           {"true_tortuosity", v.true_tortuosity},
                           {"crossing_radius_t100", crossing_radius(0.5 * (v.half_width_start + v.half_width_end), 100.0)}});
    }
    std::ofstream out(dir / "truth.json");
    out << json{{"canvas", {{"w", scene.width}, {"h", scene.height}}}, {"vessels", std::move(vessels)}}.dump(2) << '\n';
}

}  // namespace vasc::synth

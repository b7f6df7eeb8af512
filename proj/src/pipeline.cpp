#include "vasc/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "vasc/errors.hpp"
#include "vasc/graph_json.hpp"
#include "vasc/overlay.hpp"

namespace vasc {

using nlohmann::json;

// =============================================================================
// Config
// =============================================================================

void PipelineConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("config: " + what);
    };
    require(!thresholds.empty(), "thresholds must not be empty");
    validate_thresholds(thresholds);
    require(bw_index_base == 0 || bw_index_base == 1, "bw_index_base must be 0 or 1");
    require(spacing >= 2, "spacing must be >= 2");
    require(corridor >= 1, "corridor must be >= 1");
    require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be > 0");
    require(fill_radius >= 0.0 && std::isfinite(fill_radius), "fill_radius must be >= 0");
    require(spur_length >= 0.0 && std::isfinite(spur_length), "spur_length must be >= 0");
    require(delta >= 0.0 && delta <= 1.0, "delta must lie in [0,1]");
    require(tau_av >= 0.0 && tau_av <= 1.0, "tau_av must lie in [0,1]");
    require(max_rounds >= 1, "max_rounds must be >= 1");
    require(width_threshold >= 1 && width_threshold <= 255, "width_threshold must lie in [1,255]");
    require(half_width_offset >= 0.0 && half_width_offset <= 1.0, "half_width_offset must lie in [0,1]");
    require(avr_inner > 0.0 && avr_outer > avr_inner, "avr_annulus needs 0 < inner < outer");
    require(top_k >= 1, "top_k must be >= 1");
    require(tort_inner > 0.0 && tort_outer > tort_inner, "tort_zone needs 0 < inner < outer");
    require(l_min >= 1, "l_min must be >= 1");
    require(smooth_window >= 1, "smooth_window must be >= 1");
    require(c >= 0.0 && std::isfinite(c), "c must be >= 0");
    require(max_dim == 0 || max_dim >= 16, "max_dim must be 0 or >= 16");
}

json PipelineConfig::to_json() const {
    return {{"schema", 1},
            {"thresholds", thresholds},
            {"bw_index_base", bw_index_base},
            {"spacing", spacing},
            {"corridor", corridor},
            {"epsilon", epsilon},
            {"fill_radius", fill_radius},
            {"spur_length", spur_length},
            {"delta", delta},
            {"tau_av", tau_av},
            {"max_rounds", max_rounds},
            {"width_threshold", width_threshold},
            {"half_width_offset", half_width_offset},
            {"avr_annulus", {avr_inner, avr_outer}},
            {"top_k", top_k},
            {"tort_zone", {tort_inner, tort_outer}},
            {"l_min", l_min},
            {"smooth_window", smooth_window},
            {"lc_mode", to_string(lc_mode)},
            {"c", c},
            {"max_dim", max_dim},
            {"seed", seed}};
}

PipelineConfig PipelineConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    if (!doc.contains("schema") || doc.at("schema") != 1) throw ConfigError("config: schema must be 1");
    static const std::set<std::string> known{
        "schema",      "thresholds",  "bw_index_base", "spacing",    "corridor",        "epsilon",
        "fill_radius", "spur_length", "delta",         "tau_av",     "max_rounds",      "width_threshold",
        "half_width_offset", "avr_annulus", "top_k",   "tort_zone",  "l_min",           "smooth_window",
        "lc_mode",     "c",           "max_dim",       "seed"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    }
    PipelineConfig cfg;
    try {
        auto get = [&](const char* key, auto& field) {
            if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("thresholds", cfg.thresholds);
        get("bw_index_base", cfg.bw_index_base);
        get("spacing", cfg.spacing);
        get("corridor", cfg.corridor);
        get("epsilon", cfg.epsilon);
        get("fill_radius", cfg.fill_radius);
        get("spur_length", cfg.spur_length);
        get("delta", cfg.delta);
        get("tau_av", cfg.tau_av);
        get("max_rounds", cfg.max_rounds);
        get("width_threshold", cfg.width_threshold);
        get("half_width_offset", cfg.half_width_offset);
        get("top_k", cfg.top_k);
        get("l_min", cfg.l_min);
        get("smooth_window", cfg.smooth_window);
        get("c", cfg.c);
        get("max_dim", cfg.max_dim);
        get("seed", cfg.seed);
        if (doc.contains("avr_annulus")) {
            const auto a = doc.at("avr_annulus").get<std::vector<double>>();
            if (a.size() != 2) throw ConfigError("config: avr_annulus needs two values");
            cfg.avr_inner = a[0];
            cfg.avr_outer = a[1];
        }
        if (doc.contains("tort_zone")) {
            const auto z = doc.at("tort_zone").get<std::vector<double>>();
            if (z.size() != 2) throw ConfigError("config: tort_zone needs two values");
            cfg.tort_inner = z[0];
            cfg.tort_outer = z[1];
        }
        if (doc.contains("lc_mode")) cfg.lc_mode = parse_lc_mode(doc.at("lc_mode").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return from_json(doc);
}

// =============================================================================
// Analysis
// =============================================================================

namespace {

// Bilinear resample of an 8-bit plane.
template <typename G>
G resample(const G& src, int w, int h) {
    G out(w, h);
    const double sx = static_cast<double>(src.width()) / w;
    const double sy = static_cast<double>(src.height()) / h;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
            const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
            const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
            const int x1 = std::min(x0 + 1, src.width() - 1), y1 = std::min(y0 + 1, src.height() - 1);
            const double ax = fx - x0, ay = fy - y0;
            const double v = (1 - ax) * (1 - ay) * src(x0, y0) + ax * (1 - ay) * src(x1, y0) +
                             (1 - ax) * ay * src(x0, y1) + ax * ay * src(x1, y1);
            if constexpr (std::is_same_v<typename G::value_type, std::uint8_t>) {
                out(x, y) = static_cast<std::uint8_t>(std::lround(v));
            } else {
                out(x, y) = v;
            }
        }
    }
    return out;
}

}  // namespace

ExtractedGraph extract_graph(const LikelihoodMap& likelihood, const PipelineConfig& config) {
    ExtractedGraph out;
    out.field = background_distance_field(likelihood, config.thresholds, config.bw_index_base);
    const ScalarField& field = out.field;
    const BinaryMask skeletons = union_mask(likelihood, config.thresholds);
    out.union_pixels = static_cast<std::size_t>(std::count(skeletons.values().begin(), skeletons.values().end(), 1));
    const PixelGraph pixels = PixelGraph::from_mask(consolidate(skeletons, config.fill_radius));
    // Spurs are pruned on the raw skeleton too: retracing bends them and can
    // push their length over the limit.
    VesselGraph graph = prune_spurs(contract(pixels, config.spacing), config.spur_length, config.spacing);
    graph = retrace_all(graph, field, pixels, {config.corridor, config.epsilon}, config.spacing);
    out.graph = prune_spurs(graph, config.spur_length, config.spacing);
    return out;
}

Analysis analyze(const LikelihoodMap& likelihood_in, const AVProbabilityMap& av_in, const DiscGeometry& disc_in,
                 const PipelineConfig& config) {
    config.validate();
    if (likelihood_in.width() != av_in.width() || likelihood_in.height() != av_in.height() ||
        !av_in.artery.same_shape(av_in.vein)) {
        throw InputError("dimension mismatch between likelihood and A/V maps");
    }
    disc_in.validate(likelihood_in.width(), likelihood_in.height());

    Analysis a;
    LikelihoodMap likelihood = likelihood_in;
    AVProbabilityMap av = av_in;
    DiscGeometry disc = disc_in;
    const int longest = std::max(likelihood.width(), likelihood.height());
    if (config.max_dim > 0 && longest > config.max_dim) {
        const double s = static_cast<double>(config.max_dim) / longest;
        const int w = std::max(1, static_cast<int>(std::lround(likelihood.width() * s)));
        const int h = std::max(1, static_cast<int>(std::lround(likelihood.height() * s)));
        likelihood = resample(likelihood, w, h);
        av.artery = resample(av.artery, w, h);
        av.vein = resample(av.vein, w, h);
        const double sx = static_cast<double>(w) / likelihood_in.width();
        const double sy = static_cast<double>(h) / likelihood_in.height();
        disc = {(disc.cx + 0.5) * sx - 0.5, (disc.cy + 0.5) * sy - 0.5, disc.diameter * 0.5 * (sx + sy)};
        a.scale_back = 1.0 / (0.5 * (sx + sy));
    }

    ExtractedGraph extracted = extract_graph(likelihood, config);
    VesselGraph graph = std::move(extracted.graph);
    const ScalarField& field = extracted.field;
    a.union_pixels = extracted.union_pixels;

    const LabelingOptions lopts{config.delta, config.tau_av, config.max_rounds};
    PropagationResult prop = propagate(label_nodes(graph, av, lopts), lopts);
    graph = std::move(prop.graph);
    refresh_node_labels(graph);
    a.propagation_rounds = prop.rounds;
    a.propagation_converged = prop.converged;
    if (!prop.converged) a.warnings.push_back("label propagation did not converge");

    const ScalarField half = boundary_distance(binarize(likelihood, config.width_threshold), config.half_width_offset);
    for (auto& seg : graph.segments) {
        const auto w = segment_width(seg.path, half);
        seg.width = w ? w->width : 0.0;
    }
    for (auto& node : graph.nodes) node.bw = field[node.pos];
    if (graph.segments.empty()) a.warnings.push_back("empty vessel graph");

    a.avr_annulus = Annulus::around(disc, config.avr_inner, config.avr_outer);
    const AnnulusGraph sub = annulus_subgraph(graph, a.avr_annulus);
    for (const auto& w : sub.warnings) a.warnings.push_back(w);
    a.vessels = route_vessels(sub);
    measure_paths(a.vessels, half);
    std::vector<WidthSample> samples;
    for (std::size_t i = 0; i < a.vessels.size(); ++i) {
        const auto& v = a.vessels[i];
        if (v.usable) samples.push_back({static_cast<int>(i), v.width, v.label});
    }
    a.widths = top_k_by_label(samples, static_cast<std::size_t>(config.top_k));
    a.avr = compute_avr(a.widths.arteries, a.widths.veins);
    if (!a.avr) {
        a.warnings.push_back("AVR not computable: " + std::to_string(a.widths.arteries.size()) + " arteries, " +
                             std::to_string(a.widths.veins.size()) + " veins in the annulus");
    } else if (a.avr->count == 1) {
        a.warnings.push_back("AVR from a single artery/vein pair");
    }

    TortuosityOptions topts;
    topts.l_min = config.l_min;
    topts.smooth_window = config.smooth_window;
    topts.lc_mode = config.lc_mode;
    topts.c = config.c;
    topts.spacing = config.spacing;
    a.tortuosity = tortuosity_report(graph, Annulus::around(disc, config.tort_inner, config.tort_outer), topts);
    for (const auto& w : a.tortuosity.warnings) a.warnings.push_back("tortuosity: " + w);

    a.graph = std::move(graph);
    return a;
}

// =============================================================================
// Reports
// =============================================================================

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("missing file: " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

namespace {

json annulus_json(const Annulus& a, double scale) {
    return {{"cx", a.center.x * scale}, {"cy", a.center.y * scale}, {"r_inner", a.r_inner * scale},
            {"r_outer", a.r_outer * scale}};
}

json analysis_json(const Analysis& a) {
    const double s = a.scale_back;
    json avr;
    json arteries = json::array(), veins = json::array();
    // Widest first, matching the lists used for CRAE/CRVE.
    std::vector<std::pair<double, int>> order;
    for (std::size_t i = 0; i < a.vessels.size(); ++i) order.push_back({-a.vessels[i].width, static_cast<int>(i)});
    std::sort(order.begin(), order.end());
    for (const auto& [neg, i] : order) {
        const auto& v = a.vessels[i];
        if (!v.usable) continue;
        json entry{{"id", i}, {"width", v.width * s}};
        if (v.label == VesselLabel::Artery && arteries.size() < a.widths.arteries.size()) arteries.push_back(entry);
        if (v.label == VesselLabel::Vein && veins.size() < a.widths.veins.size()) veins.push_back(entry);
    }
    json flags = json::array();
    if (a.avr) {
        avr = {{"crae", a.avr->crae * s}, {"crve", a.avr->crve * s}, {"avr", a.avr->avr}, {"count", a.avr->count}};
        if (a.avr->count == 1) flags.push_back("single_pair");
    } else {
        avr = {{"crae", nullptr}, {"crve", nullptr}, {"avr", nullptr}, {"count", 0}};
        flags.push_back("not_computable");
    }
    avr["arteries"] = std::move(arteries);
    avr["veins"] = std::move(veins);
    avr["annulus"] = annulus_json(a.avr_annulus, s);
    avr["flags"] = std::move(flags);

    json tsegs = json::array();
    for (const auto& r : a.tortuosity.records) {
        // Chord-mode T_g carries 1/length units.
        const double t = a.tortuosity.lc_mode == LcMode::Chord ? r.t_g / s : r.t_g;
        tsegs.push_back({{"id", r.segment_id}, {"n", r.n_subsegments}, {"t_g", t}, {"t_norm", r.t_norm},
                         {"label", to_string(r.label)}});
    }
    json tort{{"segments", std::move(tsegs)},
              {"zone", annulus_json(a.tortuosity.zone, s)},
              {"lc_mode", to_string(a.tortuosity.lc_mode)},
              {"c", a.tortuosity.c}};

    std::size_t labels[3] = {0, 0, 0};
    for (const auto& seg : a.graph.segments) ++labels[static_cast<int>(seg.label)];
    json summary{{"union_pixels", a.union_pixels},
                 {"nodes", a.graph.nodes.size()},
                 {"segments", a.graph.segments.size()},
                 {"arteries", labels[static_cast<int>(VesselLabel::Artery)]},
                 {"veins", labels[static_cast<int>(VesselLabel::Vein)]},
                 {"unknown", labels[static_cast<int>(VesselLabel::Unknown)]},
                 {"propagation_rounds", a.propagation_rounds},
                 {"propagation_converged", a.propagation_converged},
                 {"annulus_vessels", a.vessels.size()}};
    return {{"graph_summary", std::move(summary)}, {"avr", std::move(avr)}, {"tortuosity", std::move(tort)},
            {"scale_back", s}, {"warnings", a.warnings}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

}  // namespace

json run_single(const SingleInputs& inputs, const PipelineConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    const LikelihoodMap likelihood = load_likelihood(inputs.likelihood, inputs.likelihood_channel);
    const AVProbabilityMap av = load_av_maps(inputs.av_artery, inputs.av_vein);
    if (!std::filesystem::exists(inputs.disc)) throw InputError("missing disc file: " + inputs.disc.string());
    const DiscGeometry disc = load_disc(inputs.disc);
    std::optional<DecodedImage> image;
    if (inputs.image) {
        image = read_image(*inputs.image);
        if (image->width != likelihood.width() || image->height != likelihood.height()) {
            throw InputError("dimension mismatch between image and likelihood map");
        }
    }

    json digests = json::object();
    auto digest = [&](const char* key, const std::filesystem::path& p) {
        digests[key] = {{"path", p.string()}, {"sha256", sha256_file(p)}};
    };
    if (inputs.image) digest("image", *inputs.image);
    digest("likelihood", inputs.likelihood);
    digest("av_artery", inputs.av_artery);
    digest("av_vein", inputs.av_vein);
    digest("disc", inputs.disc);

    const Analysis a = analyze(likelihood, av, disc, config);

    json report{{"schema", 1}, {"inputs", std::move(digests)}, {"config", config.to_json()}};
    report.update(analysis_json(a));

    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "report.json", report.dump(2) + "\n");
    save_graph(out_dir / "graph.json", a.graph);

    // The overlay is drawn at analysis resolution.
    RgbImage background;
    if (image && a.scale_back == 1.0) {
        background = to_rgb(*image);
    } else {
        LikelihoodMap base = likelihood;
        if (a.scale_back != 1.0) base = resample(likelihood, a.graph.width, a.graph.height);
        background = to_rgb(base);
    }
    const Annulus zone = a.tortuosity.zone;
    const RgbImage overlay = render_overlay(a.graph, {a.avr_annulus, zone}, std::move(background));
    write_png_rgb(out_dir / "overlay.png", overlay.width, overlay.height, overlay.data);
    return report;
}

// =============================================================================
// Batch
// =============================================================================

namespace {

struct ManifestRow {
    int line = 0;
    std::string id;
    std::map<std::string, std::string> cells;
    std::string parse_error;
};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool safe_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

}  // namespace

BatchOutcome run_batch(const std::filesystem::path& manifest, const PipelineConfig& config,
                       const std::filesystem::path& out_dir, unsigned threads) {
    config.validate();
    std::ifstream in(manifest);
    if (!in) throw InputError("missing file: " + manifest.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty manifest");
    const auto header = split_line(line);
    for (const char* required : {"id", "likelihood", "av_artery", "av_vein", "disc"}) {
        if (std::find(header.begin(), header.end(), required) == header.end()) {
            throw InputError(std::string("manifest lacks column '") + required + "'");
        }
    }

    std::vector<ManifestRow> rows;
    std::set<std::string> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ManifestRow row;
        row.line = line_no;
        const auto cells = split_line(line);
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row.cells[header[i]] = cells[i];
        row.id = row.cells["id"];
        if (cells.size() != header.size()) {
            row.parse_error = "expected " + std::to_string(header.size()) + " columns, got " + std::to_string(cells.size());
        } else if (!safe_id(row.id)) {
            row.parse_error = "invalid id";
        } else if (!seen.insert(row.id).second) {
            row.parse_error = "duplicate id";
        }
        if (row.id.empty()) row.id = "line" + std::to_string(line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("empty manifest");

    const std::filesystem::path base = manifest.parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    std::vector<json> results(rows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            const ManifestRow& row = rows[i];
            json result{{"id", row.id}, {"line", row.line}};
            try {
                if (!row.parse_error.empty()) throw InputError(row.parse_error);
                SingleInputs inputs;
                inputs.likelihood = resolve(row.cells.at("likelihood"));
                inputs.av_artery = resolve(row.cells.at("av_artery"));
                inputs.av_vein = resolve(row.cells.at("av_vein"));
                inputs.disc = resolve(row.cells.at("disc"));
                if (row.cells.count("image") && !row.cells.at("image").empty()) {
                    inputs.image = resolve(row.cells.at("image"));
                }
                std::optional<double> reference;
                if (row.cells.count("reference_avr") && !row.cells.at("reference_avr").empty()) {
                    try {
                        reference = std::stod(row.cells.at("reference_avr"));
                    } catch (const std::exception&) {
                        throw InputError("reference_avr is not a number");
                    }
                }
                const json report = run_single(inputs, config, out_dir / row.id);
                result["status"] = "ok";
                result["avr"] = report.at("avr").at("avr");
                result["warnings"] = report.at("warnings");
                if (reference) result["reference_avr"] = *reference;
            } catch (const std::exception& e) {
                result["status"] = "failed";
                result["error"] = e.what();
            }
            results[i] = std::move(result);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BatchOutcome out;
    PairedSeries pairs;
    for (const auto& r : results) {
        if (r.at("status") == "ok") {
            ++out.succeeded;
            if (r.contains("reference_avr") && r.at("avr").is_number()) {
                pairs.rows.push_back({r.at("id"), r.at("reference_avr"), r.at("avr")});
            }
        } else {
            ++out.failed;
        }
    }
    out.report = {{"schema", 1},
                  {"manifest", {{"path", manifest.string()}, {"sha256", sha256_file(manifest)}}},
                  {"config", config.to_json()},
                  {"rows", results},
                  {"succeeded", out.succeeded},
                  {"failed", out.failed}};
    if (pairs.rows.size() >= 2) {
        out.report["summary"] = to_json(summarize(pairs));
    } else {
        out.report["summary"] = nullptr;
    }
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "batch_report.json", out.report.dump(2) + "\n");
    return out;
}

}  // namespace vasc

#include "vasc/cli.hpp"

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "vasc/errors.hpp"
#include "vasc/pipeline.hpp"
#include "vasc/stats.hpp"
#include "vasc/synth.hpp"

namespace vasc {

namespace {

PipelineConfig config_from(const std::string& path) {
    return path.empty() ? PipelineConfig{} : PipelineConfig::load(path);
}

int cmd_measure(const SingleInputs& inputs, const std::string& config_path, const std::string& out) {
    const PipelineConfig config = config_from(config_path);
    const auto report = run_single(inputs, config, out);
    const auto& avr = report.at("avr").at("avr");
    std::cout << "avr " << (avr.is_null() ? std::string("n/a") : avr.dump()) << "  segments "
              << report.at("graph_summary").at("segments") << "  warnings " << report.at("warnings").size() << '\n';
    return 0;
}

int cmd_batch(const std::string& manifest, const std::string& config_path, const std::string& out, unsigned threads) {
    const PipelineConfig config = config_from(config_path);
    const BatchOutcome outcome = run_batch(manifest, config, out, threads);
    std::cout << "succeeded " << outcome.succeeded << "  failed " << outcome.failed << '\n';
    if (!outcome.report.at("summary").is_null()) std::cout << outcome.report.at("summary").dump(2) << '\n';
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& preset, std::uint64_t seed, const std::string& out) {
    synth::SceneSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw InputError("missing file: " + spec_path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("malformed scene description: ") + e.what());
        }
        spec = synth::scene_from_json(doc);
    } else if (preset == "radial-fan") {
        spec = synth::radial_fan();
        spec.seed = seed;
    } else if (preset == "random-tree") {
        spec = synth::random_tree(seed);
    } else {
        throw InputError("synth needs --spec or --preset radial-fan|random-tree");
    }
    const synth::Scene scene = synth::generate_scene(spec);
    const synth::RasterizedScene raster = synth::rasterize(scene);
    synth::write_scene_outputs(scene, raster, out);
    std::ofstream(std::filesystem::path(out) / "scene.json") << synth::scene_to_json(spec).dump(2) << '\n';
    std::cout << "wrote " << scene.vessels.size() << " vessels to " << out << '\n';
    return 0;
}

int cmd_stats(const std::string& pairs, const std::string& ref_col, const std::string& cand_col,
              const std::vector<double>& cutoffs, const std::string& sd, const std::string& points,
              const std::string& out) {
    const PairedSeries series = load_pairs(pairs, ref_col, cand_col);
    if (series.rows.size() < 2) throw InputError("stats needs at least two rows");
    const SdMode mode = sd == "sample" ? SdMode::Sample : SdMode::Population;
    const std::string text = to_json(summarize(series, cutoffs, mode)).dump(2);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream(out) << text << '\n';
    }
    if (!points.empty()) std::ofstream(points) << bland_altman_csv(bland_altman_points(series));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Retinal vessel topology and morphometry"};
    app.require_subcommand(1);

    SingleInputs inputs;
    std::string image, likelihood_channel = "none", config_path, out;
    auto* measure = app.add_subcommand("measure", "Measure AVR and tortuosity on one image");
    measure->add_option("--image", image, "Fundus image used as overlay background");
    measure->add_option("--likelihood", inputs.likelihood, "Vessel likelihood map")->required();
    measure->add_option("--likelihood-channel", likelihood_channel, "Plane of a colour likelihood file")
        ->check(CLI::IsMember({"none", "red", "green", "blue"}));
    measure->add_option("--av-artery", inputs.av_artery, "Artery probability map")->required();
    measure->add_option("--av-vein", inputs.av_vein, "Vein probability map")->required();
    measure->add_option("--disc", inputs.disc, "Disc geometry JSON")->required();
    measure->add_option("--config", config_path, "Pipeline config JSON");
    measure->add_option("--out", out, "Output directory")->required();

    std::string manifest;
    unsigned threads = 0;
    auto* batch = app.add_subcommand("batch", "Measure every row of a manifest");
    batch->add_option("--manifest", manifest, "CSV manifest")->required();
    batch->add_option("--config", config_path, "Pipeline config JSON");
    batch->add_option("--out", out, "Output directory")->required();
    batch->add_option("--threads", threads, "Worker threads (0 = hardware)");

    std::string spec_path, preset;
    std::uint64_t seed = 0;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
    synth_cmd->add_option("--spec", spec_path, "Scene description JSON");
    synth_cmd->add_option("--preset", preset, "radial-fan or random-tree")
        ->check(CLI::IsMember({"radial-fan", "random-tree"}));
    synth_cmd->add_option("--seed", seed, "Seed for presets");
    synth_cmd->add_option("--out", out, "Output directory")->required();

    std::string pairs, ref_col = "reference", cand_col = "candidate", sd = "population", points;
    std::vector<double> cutoffs = kDefaultErrorCutoffs;
    auto* stats_cmd = app.add_subcommand("stats", "Agreement statistics over paired ratios");
    stats_cmd->add_option("--pairs", pairs, "CSV with id and two ratio columns")->required();
    stats_cmd->add_option("--reference-column", ref_col, "Reference column name");
    stats_cmd->add_option("--candidate-column", cand_col, "Candidate column name");
    stats_cmd->add_option("--cutoffs", cutoffs, "Absolute error cutoffs")->delimiter(',');
    stats_cmd->add_option("--sd", sd, "population or sample")->check(CLI::IsMember({"population", "sample"}));
    stats_cmd->add_option("--points", points, "Write Bland-Altman points CSV here");
    stats_cmd->add_option("--out", out, "Write the summary JSON here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*measure) {
            if (!image.empty()) inputs.image = image;
            inputs.likelihood_channel = parse_channel(likelihood_channel);
            return cmd_measure(inputs, config_path, out);
        }
        if (*batch) return cmd_batch(manifest, config_path, out, threads);
        if (*synth_cmd) return cmd_synth(spec_path, preset, seed, out);
        if (*stats_cmd) return cmd_stats(pairs, ref_col, cand_col, cutoffs, sd, points, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace vasc

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include "sempri/dataset_io.hpp"
#include "sempri/metrics.hpp"
#include "sempri/pipeline.hpp"
#include "sempri/synth.hpp"

namespace fs = std::filesystem;
using namespace sempri;

namespace {

// Flags shared by every subcommand. Values land in `cfg` after the config
// file (if any) is applied, so the precedence is defaults < file < flags.
struct SharedFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 0;
    int num_classes = 0;
    int superpixel_target = 0;
    double compactness = 0.0;
    double epsilon = 0.0;
    int trees = 0;
    int max_depth = 0;
    int min_leaf = 0;
    int features_per_split = 0;
    std::string prior_table;
    std::string texton_dict;
    std::string forest;
    std::string artifacts_dir;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--seed", seed, "master RNG seed");
        cmd->add_option("--jobs", jobs, "worker threads (0 = logical cores)");
        cmd->add_option("--num-classes", num_classes, "semantic class count incl. 'others'");
        cmd->add_option("--superpixels", superpixel_target, "target region count per image");
        cmd->add_option("--compactness", compactness, "SLIC compactness");
        cmd->add_option("--epsilon", epsilon, "prior denominator epsilon");
        cmd->add_option("--trees", trees, "forest tree count");
        cmd->add_option("--max-depth", max_depth, "forest max depth");
        cmd->add_option("--min-leaf", min_leaf, "forest min samples per leaf");
        cmd->add_option("--features-per-split", features_per_split,
                        "candidate features per split");
        cmd->add_option("--prior-table", prior_table, "prior table file");
        cmd->add_option("--texton-dict", texton_dict, "texton dictionary file");
        cmd->add_option("--forest", forest, "forest file");
        cmd->add_option("--artifacts-dir", artifacts_dir,
                        "directory prefix for relative artifact paths");
    }

    PipelineConfig resolve(const CLI::App* cmd) const {
        PipelineConfig cfg;
        if (cmd->count("--config") > 0) cfg = load_config(config_path);
        if (cmd->count("--seed") > 0) cfg.seed = seed;
        if (cmd->count("--jobs") > 0) cfg.jobs = jobs;
        if (cmd->count("--num-classes") > 0) cfg.num_classes = num_classes;
        if (cmd->count("--superpixels") > 0) cfg.superpixel_target = superpixel_target;
        if (cmd->count("--compactness") > 0) cfg.compactness = compactness;
        if (cmd->count("--epsilon") > 0) cfg.epsilon = epsilon;
        if (cmd->count("--trees") > 0) cfg.forest.tree_count = trees;
        if (cmd->count("--max-depth") > 0) cfg.forest.max_depth = max_depth;
        if (cmd->count("--min-leaf") > 0) cfg.forest.min_leaf = min_leaf;
        if (cmd->count("--features-per-split") > 0) {
            cfg.forest.features_per_split = features_per_split;
        }
        if (cmd->count("--prior-table") > 0) cfg.prior_table_path = prior_table;
        if (cmd->count("--texton-dict") > 0) cfg.texton_dict_path = texton_dict;
        if (cmd->count("--forest") > 0) cfg.forest_path = forest;
        if (cmd->count("--artifacts-dir") > 0) {
            const fs::path dir = artifacts_dir;
            auto prefix = [&](fs::path& p) {
                if (p.is_relative()) p = dir / p;
            };
            prefix(cfg.prior_table_path);
            prefix(cfg.texton_dict_path);
            prefix(cfg.forest_path);
        }
        if (cfg.num_classes < 2 || cfg.superpixel_target < 1 || cfg.epsilon <= 0.0) {
            throw CLI::ValidationError("configuration values out of range");
        }
        return cfg;
    }
};

void save_superpixels(const Segmentation& seg, const fs::path& dir, const std::string& stem) {
    fs::create_directories(dir);
    write_label_png16(seg.labels, seg.height, seg.width, dir / (stem + ".png"));
}

int run_train(const std::string& manifest_path, const std::string& dump_csv,
              const PipelineConfig& cfg) {
    const DatasetManifest manifest = parse_manifest(manifest_path, ManifestSplit::Train);
    if (manifest.entries.empty()) throw DataError("empty training manifest: " + manifest_path);
    const TrainedArtifacts artifacts = train_pipeline(manifest, cfg, dump_csv);
    save_artifacts(artifacts, cfg);
    log_info("wrote " + cfg.prior_table_path.string() + ", " +
             cfg.texton_dict_path.string() + ", " + cfg.forest_path.string());
    return 0;
}

int run_infer(const std::string& manifest_path, const std::string& out_dir,
              bool save_intermediates, const std::string& superpixel_dir,
              const PipelineConfig& cfg) {
    const DatasetManifest manifest = parse_manifest(manifest_path, ManifestSplit::Test);
    if (manifest.entries.empty()) throw DataError("empty manifest: " + manifest_path);
    const TrainedArtifacts artifacts = load_artifacts(cfg);
    fs::create_directories(out_dir);

    parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        const ImageBuffer image = load_image(entry.image);
        const SemanticScoreMap scores = load_score_tensor(entry.tensor);
        InferenceResult result;
        try {
            result = infer_image(image, scores, artifacts, cfg);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (entry " + entry.image.string() + ")");
        }
        const std::string stem = entry.image.stem().string();
        write_saliency_map(result.fused, fs::path(out_dir) / (stem + ".png"));
        if (save_intermediates) {
            write_saliency_map(result.explicit_map,
                               fs::path(out_dir) / (stem + "_explicit.png"));
            write_saliency_map(result.implicit_map,
                               fs::path(out_dir) / (stem + "_implicit.png"));
        }
        if (!superpixel_dir.empty()) save_superpixels(result.seg, superpixel_dir, stem);
    });
    log_info("wrote " + std::to_string(manifest.size()) + " saliency maps to " + out_dir);
    return 0;
}

int run_eval(const std::string& manifest_path, const std::string& maps_dir,
             const std::string& out_csv) {
    const DatasetManifest manifest = parse_manifest(manifest_path, ManifestSplit::Test);
    const DatasetReport report = evaluate_dataset(maps_dir, manifest);
    const fs::path out = out_csv.empty() ? fs::path(maps_dir) / "report.csv" : fs::path(out_csv);
    write_report_csv(report, out);
    std::printf("images %zu  adaptive P %.6f  R %.6f  F %.6f  MAE %.6f\n", report.image_count,
                report.adaptive_precision, report.adaptive_recall, report.adaptive_f,
                report.mean_mae);
    log_info("wrote report to " + out.string());
    return 0;
}

int run_synth(const std::string& out_dir, int count, int width, int height,
              const PipelineConfig& cfg) {
    SynthOptions options;
    options.count = count;
    options.width = width;
    options.height = height;
    options.num_classes = cfg.num_classes;
    options.seed = cfg.seed;
    const fs::path manifest = generate_dataset(options, out_dir);
    log_info("wrote " + std::to_string(count) + " scenes, manifest " + manifest.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic-prior salient object detection"};
    app.require_subcommand(1);

    SharedFlags train_flags, infer_flags, eval_flags, synth_flags;

    std::string train_manifest, train_dump_csv;
    CLI::App* train_cmd = app.add_subcommand("train", "learn priors, textons and the forest");
    train_cmd->add_option("manifest", train_manifest, "train manifest (image\\tmask\\ttensor)")
        ->required();
    train_cmd->add_option("--dump-training-set", train_dump_csv,
                          "write the regional training set to this CSV");
    train_flags.add_to(train_cmd);

    std::string infer_manifest, infer_out, superpixel_dir;
    bool save_intermediates = false;
    CLI::App* infer_cmd = app.add_subcommand("infer", "produce saliency maps");
    infer_cmd->add_option("manifest", infer_manifest, "test manifest (mask column may be '-')")
        ->required();
    infer_cmd->add_option("--out", infer_out, "output directory")->required();
    infer_cmd->add_flag("--save-intermediates", save_intermediates,
                        "also write explicit/implicit maps");
    infer_cmd->add_option("--save-superpixels", superpixel_dir,
                          "write 16-bit region label PNGs to this directory");
    infer_flags.add_to(infer_cmd);

    std::string eval_manifest, eval_maps, eval_out;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score saliency maps against ground truth");
    eval_cmd->add_option("manifest", eval_manifest, "manifest with masks")->required();
    eval_cmd->add_option("--maps", eval_maps, "directory of saliency PNGs")->required();
    eval_cmd->add_option("--out", eval_out, "report CSV path (default <maps>/report.csv)");
    eval_flags.add_to(eval_cmd);

    std::string synth_out;
    int synth_count = 10, synth_width = 160, synth_height = 120;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--count", synth_count, "number of scenes")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--width", synth_width, "scene width")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--height", synth_height, "scene height")->check(CLI::PositiveNumber);
    synth_flags.add_to(synth_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train_cmd->parsed()) {
            return run_train(train_manifest, train_dump_csv, train_flags.resolve(train_cmd));
        }
        if (infer_cmd->parsed()) {
            return run_infer(infer_manifest, infer_out, save_intermediates, superpixel_dir,
                             infer_flags.resolve(infer_cmd));
        }
        if (eval_cmd->parsed()) {
            return run_eval(eval_manifest, eval_maps, eval_out);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth_out, synth_count, synth_width, synth_height,
                             synth_flags.resolve(synth_cmd));
        }
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}

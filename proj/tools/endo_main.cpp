// Command-line front end for the endoscopic image pipeline: render a
// fly-through, cleanse a dataset, train the translator, translate images,
// evaluate results, benchmark inference.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "endo/config.hpp"
#include "endo/data/cleansing.hpp"
#include "endo/data/image_io.hpp"
#include "endo/eval/evaluate.hpp"
#include "endo/render/fly_through.hpp"
#include "endo/render/phantom.hpp"
#include "endo/toy.hpp"
#include "endo/train/gradient_check.hpp"
#include "endo/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace endo;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    long long seed = -1; // -1 = keep config value
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg.load_file(args.config_path);
    if (args.seed >= 0) {
        cfg.set("train", "seed", std::to_string(args.seed));
        cfg.set("bench", "seed", std::to_string(args.seed));
    }
    return cfg;
}

void prepare_out(const RunConfig& cfg, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    cfg.echo((fs::path(out_dir) / "effective_config.ini").string());
}

CtVolume resolve_volume(const RunConfig& cfg) {
    const std::string& volume_path = cfg.get("render", "volume");
    if (!volume_path.empty()) return load_volume(volume_path);
    const std::string& kind_name = cfg.get("render", "phantom");
    PhantomKind kind;
    if (kind_name == "sphere")
        kind = PhantomKind::Sphere;
    else if (kind_name == "tube")
        kind = PhantomKind::Tube;
    else if (kind_name == "torus")
        kind = PhantomKind::Torus;
    else
        throw ConfigError("render.phantom must be sphere|tube|torus, got " +
                          kind_name);
    int n = cfg.get_int("render", "phantom_size");
    PhantomParams params;
    params.radius = cfg.get_double("render", "phantom_radius");
    params.wall_thickness = cfg.get_double("render", "phantom_wall");
    return make_phantom(kind, {n, n, n}, params).volume;
}

FlyThroughPath resolve_path(const RunConfig& cfg, const CtVolume& vol) {
    FlyThroughPath path;
    path.samples_per_segment = cfg.get_int("render", "samples_per_segment");
    const std::string& path_file = cfg.get("render", "path_file");
    if (!path_file.empty()) {
        std::ifstream in(path_file);
        if (!in) throw IoError("cannot read path file: " + path_file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            FlyThroughPath::Keyframe kf;
            if (!(ls >> kf.position.x >> kf.position.y >> kf.position.z >>
                  kf.look_target.x >> kf.look_target.y >> kf.look_target.z))
                throw FormatError("path line is not 'px py pz tx ty tz': " + line);
            path.keyframes.push_back(kf);
        }
    } else {
        // Default: straight run down the volume center line (the tube axis
        // for tube phantoms).
        Vec3 c = vol.center();
        double z0 = vol.box_min().z, z1 = vol.box_max().z;
        double span = z1 - z0;
        path.keyframes = {
            {{c.x, c.y, z0 + 0.2 * span}, {c.x, c.y, z0 + 0.6 * span}},
            {{c.x, c.y, z0 + 0.45 * span}, {c.x, c.y, z0 + 0.85 * span}},
            {{c.x, c.y, z0 + 0.7 * span}, {c.x, c.y, z1}},
        };
    }
    return path;
}

int cmd_render(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);
    CtVolume vol = resolve_volume(cfg);
    FlyThroughPath path = resolve_path(cfg, vol);
    RenderParams rp;
    rp.step_size = cfg.get_double("render", "step_size");
    TransferFunction tf = TransferFunction::colon_default();
    auto frames = fly_through(vol, path, tf, rp, cfg.get_double("render", "fov"),
                              cfg.get_int("render", "image_size"));
    std::string manifest = export_dataset(frames, args.out_dir,
                                          cfg.get("render", "source_tag"));
    std::cout << "rendered " << frames.size() << " frames; manifest at "
              << manifest << "\n";
    return 0;
}

std::vector<ImageRecord> records_from_manifest(const std::string& manifest_path,
                                               const std::string& root) {
    std::vector<ImageRecord> records;
    for (const auto& m : read_manifest(manifest_path)) {
        ImageRecord rec;
        rec.id = m.filename;
        rec.path = (fs::path(root) / m.filename).string();
        rec.domain = parse_domain(m.domain);
        records.push_back(rec);
    }
    return records;
}

int cmd_cleanse(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);
    const std::string& manifest_path = cfg.get("cleanse", "manifest");
    if (manifest_path.empty())
        throw ConfigError("cleanse.manifest is required");
    const std::string& root = cfg.get("cleanse", "image_root");
    auto records = records_from_manifest(
        manifest_path, root.empty() ? fs::path(manifest_path).parent_path().string()
                                    : root);

    std::vector<ExclusionEntry> exclusions;
    if (!cfg.get("cleanse", "exclusions").empty())
        exclusions = read_exclusion_manifest(cfg.get("cleanse", "exclusions"));

    HeuristicRules rules;
    rules.enabled = cfg.get_bool("cleanse", "heuristics");
    rules.narrow_band_area = cfg.get_double("cleanse", "narrow_band_area");
    rules.narrow_band_saturation =
        cfg.get_double("cleanse", "narrow_band_saturation");
    rules.tool_area = cfg.get_double("cleanse", "tool_area");
    rules.tool_saturation = cfg.get_double("cleanse", "tool_saturation");

    auto result = apply_cleansing(records, exclusions, rules,
                                  [](const ImageRecord& r) {
                                      return load_image(r.path);
                                  });

    std::vector<ManifestRecord> kept;
    for (const auto& r : result.kept.records())
        kept.push_back({r.id, domain_name(r.domain), "cleansed"});
    write_manifest((fs::path(args.out_dir) / "kept.tsv").string(), kept);

    std::vector<ExclusionEntry> removed;
    for (const auto& r : result.removed)
        for (auto label : r.exclusion_labels.labels())
            removed.push_back({r.id, exclusion_label_name(label)});
    write_exclusion_manifest((fs::path(args.out_dir) / "removed.tsv").string(),
                             removed);

    std::ofstream report((fs::path(args.out_dir) / "cleansing_report.txt").string(),
                         std::ios::binary);
    report << result.report.to_string();
    std::cout << result.report.to_string();
    return 0;
}

DomainImages domain_from_manifest(const std::string& manifest_path,
                                  const std::string& root, int image_size) {
    if (manifest_path.empty())
        throw ConfigError("dataset manifest path is required");
    auto records = read_manifest(manifest_path);
    if (records.empty()) throw DatasetError("empty manifest: " + manifest_path);
    std::string base = root.empty()
                           ? fs::path(manifest_path).parent_path().string()
                           : root;
    auto shared = std::make_shared<std::vector<ManifestRecord>>(std::move(records));
    LoadOptions opts;
    opts.resize_to = image_size;
    return {shared->size(), [shared, base, opts](std::size_t i) {
                return load_image((fs::path(base) / (*shared)[i].filename).string(),
                                  opts);
            }};
}

int cmd_train(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);

    ArchitectureSpec spec;
    spec.variant = parse_variant(cfg.get("train", "variant"));
    spec.base_channels = cfg.get_int("train", "base_channels");
    spec.input_height = spec.input_width = cfg.get_int("train", "image_size");

    TrainingConfig tc;
    tc.epochs = cfg.get_int("train", "epochs");
    tc.batch_size = cfg.get_int("train", "batch_size");
    tc.learning_rate = cfg.get_double("train", "learning_rate");
    tc.beta1 = cfg.get_double("train", "beta1");
    tc.beta2 = cfg.get_double("train", "beta2");
    tc.fake_buffer_size = cfg.get_int("train", "fake_buffer_size");
    tc.checkpoint_every = cfg.get_int("train", "checkpoint_every");
    tc.max_steps = cfg.get_int("train", "max_steps");
    tc.disc_layers = cfg.get_int("train", "disc_layers");
    tc.disc_base_channels = cfg.get_int("train", "disc_base_channels");
    tc.seed = cfg.get_u64("train", "seed");

    LossWeights w;
    w.lambda_cyc = cfg.get_double("train", "lambda_cyc");
    w.epsilon_log = cfg.get_double("train", "epsilon_log");
    w.gan_form = parse_gan_form(cfg.get("train", "gan_form"));

    DomainImages V = domain_from_manifest(cfg.get("train", "virtual_manifest"),
                                          cfg.get("train", "virtual_root"),
                                          spec.input_height);
    DomainImages R = domain_from_manifest(cfg.get("train", "real_manifest"),
                                          cfg.get("train", "real_root"),
                                          spec.input_height);

    TrainResult result = train<float>(V, R, spec, tc, w, args.out_dir,
                                      cfg.get("train", "resume"));
    std::cout << "trained " << result.records.size() << " steps; checkpoint at "
              << result.final_checkpoint << "\n";
    return 0;
}

int cmd_translate(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);
    const std::string& ckpt_path = cfg.get("translate", "checkpoint");
    if (ckpt_path.empty()) throw ConfigError("translate.checkpoint is required");
    Checkpoint ckpt = Checkpoint::load(ckpt_path);
    auto [spec, generator] = load_generator<float>(ckpt);

    const std::string& expected = cfg.get("translate", "variant");
    if (!expected.empty() && expected != variant_name(spec.variant))
        throw ConfigError("checkpoint variant " + variant_name(spec.variant) +
                          " does not match requested variant " + expected);

    LoadOptions opts;
    if (cfg.get_bool("translate", "resize")) opts.resize_to = spec.input_height;
    auto manifest = read_manifest(cfg.get("translate", "input_manifest"));
    std::string root = cfg.get("translate", "input_root");
    if (root.empty())
        root = fs::path(cfg.get("translate", "input_manifest"))
                   .parent_path()
                   .string();

    std::vector<Image> inputs;
    inputs.reserve(manifest.size());
    for (const auto& m : manifest)
        inputs.push_back(load_image((fs::path(root) / m.filename).string(), opts));

    auto outputs = translate(generator, inputs,
                             cfg.get_int("translate", "batch_size"));

    std::vector<ManifestRecord> out_manifest;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "trans_%05zu.png", i);
        save_image(outputs[i], (fs::path(args.out_dir) / name).string());
        out_manifest.push_back(
            {name, "real", "translated:" + variant_name(spec.variant)});
    }
    write_manifest((fs::path(args.out_dir) / "manifest.tsv").string(),
                   out_manifest);
    std::cout << "translated " << outputs.size() << " images\n";
    return 0;
}

std::vector<Image> load_set(const std::string& manifest_path,
                            const std::string& root) {
    auto manifest = read_manifest(manifest_path);
    std::string base =
        root.empty() ? fs::path(manifest_path).parent_path().string() : root;
    std::vector<Image> images;
    images.reserve(manifest.size());
    for (const auto& m : manifest)
        images.push_back(load_image((fs::path(base) / m.filename).string()));
    return images;
}

int cmd_eval(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);

    auto inputs = load_set(cfg.get("eval", "input_manifest"),
                           cfg.get("eval", "input_root"));
    auto translated = load_set(cfg.get("eval", "translated_manifest"),
                               cfg.get("eval", "translated_root"));
    auto reals = load_set(cfg.get("eval", "real_manifest"),
                          cfg.get("eval", "real_root"));

    EvalReport report;
    report.temporal_smoothness = temporal_smoothness(inputs, translated);
    report.color_histogram_distance =
        color_histogram_distance(translated, reals, cfg.get_int("eval", "bins"));
    const std::string& ckpt_path = cfg.get("eval", "checkpoint");
    if (!ckpt_path.empty()) {
        auto [spec, generator] = load_generator<float>(Checkpoint::load(ckpt_path));
        report.variant = variant_name(spec.variant);
        LoadOptions opts;
        opts.resize_to = spec.input_height;
        Image probe = inputs.front();
        if (probe.height != spec.input_height || probe.width != spec.input_width)
            probe = resize_center_crop(probe, spec.input_height);
        report.seconds_per_image =
            benchmark_inference(generator, probe, cfg.get_int("eval", "runs"));
    }
    auto in_manifest = read_manifest(cfg.get("eval", "input_manifest"));
    auto tr_manifest = read_manifest(cfg.get("eval", "translated_manifest"));
    for (std::size_t i = 0; i < std::min(in_manifest.size(), tr_manifest.size());
         ++i)
        report.per_image.emplace_back(in_manifest[i].filename,
                                      tr_manifest[i].filename);
    report.save((fs::path(args.out_dir) / "eval_report.txt").string(),
                (fs::path(args.out_dir) / "eval_per_image.csv").string());
    std::cout << report.to_string();
    return 0;
}

int cmd_bench(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    prepare_out(cfg, args.out_dir);
    const int size = cfg.get_int("bench", "image_size");
    const int base = cfg.get_int("bench", "base_channels");
    const int runs = cfg.get_int("bench", "runs");
    const std::uint64_t seed = cfg.get_u64("bench", "seed");

    Image probe(size, size, 3, 0.5f);
    std::ostringstream out;
    out.precision(6);
    for (Variant variant : {Variant::ShallowUnet, Variant::Unet,
                            Variant::DeepUnet, Variant::ResidualUnet}) {
        ArchitectureSpec spec;
        spec.variant = variant;
        spec.base_channels = base;
        spec.input_height = spec.input_width = size;
        Network<float> g(build_translator(spec));
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(variant) + 41);
        g.init_parameters(rng);
        double median = benchmark_inference(g, probe, runs);
        out << variant_name(variant) << " = " << median << " s/image ("
            << g.description().parameter_count() << " parameters)\n";
    }
    std::ofstream report((fs::path(args.out_dir) / "bench_report.txt").string(),
                         std::ios::binary);
    report << out.str();
    std::cout << out.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"virtual-to-real endoscopic image pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string command;
    for (const char* name : {"render", "cleanse", "train", "translate", "eval",
                             "bench"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "run configuration file");
        sub->add_option("--seed", args.seed, "override the configured seed");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->callback([&command, name]() { command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (command == "render") return cmd_render(args);
        if (command == "cleanse") return cmd_cleanse(args);
        if (command == "train") return cmd_train(args);
        if (command == "translate") return cmd_translate(args);
        if (command == "eval") return cmd_eval(args);
        if (command == "bench") return cmd_bench(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    std::cerr << "error: no command selected" << std::endl;
    return 1;
}

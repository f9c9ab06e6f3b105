#include "vren/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vren/parallel.hpp"
#include "vren/rng.hpp"

namespace vren {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kRefSeedBase = 1000;
constexpr std::uint64_t kOracleSeed = 2000;
constexpr std::uint64_t kArmSeed = 3000;
constexpr std::uint64_t kNoiseSeed = 4000;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string sanitize_name(std::string name) {
    for (auto& c : name)
        if (c == ',' || c == '\n' || c == '\r')
            c = '_';
    return name;
}

}  // namespace

std::string resolve_output_dir(const std::string& configured) {
    const char* root = std::getenv(kOutputRootEnv);
    if (root != nullptr && root[0] != '\0')
        return (std::filesystem::path(root) / configured).string();
    return configured;
}

void validate_config(const ExperimentConfig& config) {
    std::vector<std::string> problems;

    if (config.schema_version != kConfigSchemaVersion)
        problems.push_back("schema_version: expected " +
                           std::to_string(kConfigSchemaVersion));
    if (config.arms.empty())
        problems.push_back("arms: at least one arm required");

    bool needs_refs = config.field == FieldChoice::kPhotoconsistency;
    for (size_t i = 0; i < config.arms.size(); ++i) {
        const ArmConfig& arm = config.arms[i];
        std::string path = "arms[" + std::to_string(i) + "]";
        if (arm.sampler == SamplerKind::kStratified) {
            if (arm.n_stratified < 1)
                problems.push_back(path + ".n: must be >= 1");
        } else {
            needs_refs = needs_refs ||
                         config.coarse_depth.source == CoarseDepthSource::kPlaneSweep;
            if (arm.n_coarse < 0 || arm.n_dynamic < 0 ||
                arm.n_coarse + arm.n_dynamic < 1)
                problems.push_back(path + ": gads budget must total >= 1");
            else if (arm.n_dynamic > 0 && arm.n_coarse + arm.n_dynamic < 3)
                problems.push_back(path + ": gads budget must total >= 3 when dynamic");
        }
    }

    if (config.scene_id.empty() && !config.inline_scene)
        problems.push_back("scene: either an id or an inline scene required");
    if (!config.scene_id.empty()) {
        bool known = false;
        for (const auto& s : make_scene_suite(config.seed))
            if (s.name == config.scene_id)
                known = true;
        if (!known)
            problems.push_back("scene.id: unknown scene '" + config.scene_id + "'");
    }

    int n_refs = config.explicit_rig
                     ? static_cast<int>(config.explicit_rig->refs.size())
                     : config.rig_params.n_refs;
    if (needs_refs && n_refs < 2)
        problems.push_back("rig.n_refs: >= 2 required for plane-sweep or photo arms");

    double near = config.explicit_rig ? config.explicit_rig->t_near
                                      : config.rig_params.t_near;
    double far = config.explicit_rig ? config.explicit_rig->t_far
                                     : config.rig_params.t_far;
    if (!(near >= 0.0) || !(near < far))
        problems.push_back("rig: requires 0 <= near < far");
    if (!config.explicit_rig) {
        if (config.rig_params.image_width <= 0 || config.rig_params.image_height <= 0)
            problems.push_back("rig: image size must be positive");
        if (!(config.rig_params.fov_deg > 0.0) || !(config.rig_params.fov_deg < 180.0))
            problems.push_back("rig.fov_deg: must be in (0, 180)");
    }

    if (config.oracle_samples < 1)
        problems.push_back("oracle_samples: must be >= 1");
    if (!(config.delta_d > 0.0))
        problems.push_back("delta_d: must be positive");
    if (config.dc_noise < 0.0)
        problems.push_back("dc_noise: must be >= 0");
    if (config.coarse_depth.hypotheses < 2)
        problems.push_back("coarse_depth.hypotheses: must be >= 2");
    if (!(config.coarse_depth.tau > 0.0))
        problems.push_back("coarse_depth.tau: must be positive");
    if (!(config.eps_bg > 0.0))
        problems.push_back("eps_bg: must be positive");
    if (config.msc_levels < 1)
        problems.push_back("msc_levels: must be >= 1");
    if (config.alpha < 0.0 || config.beta < 0.0)
        problems.push_back("alpha/beta: must be >= 0");

    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
}

namespace {

DepthMap analytic_depth_map(const SceneDescription& scene, const Camera& camera,
                            double t_near, double t_far, int threads) {
    AnalyticField field(scene);
    const CameraIntrinsics& k = camera.intrinsics;
    DepthMap map(k.width, k.height);
    parallel_for(0, k.height, threads, [&](int y) {
        for (int x = 0; x < k.width; ++x) {
            Ray ray = ray_for_pixel_center(k, camera.pose, x, y, t_near, t_far);
            map.at(x, y) = ground_truth_depth(field, ray);
        }
    });
    return map;
}

std::pair<SceneDescription, Rig> resolve_scene(const ExperimentConfig& config) {
    if (!config.scene_id.empty()) {
        for (auto& s : make_scene_suite(config.seed, config.rig_params))
            if (s.name == config.scene_id)
                return {s.scene, config.explicit_rig ? *config.explicit_rig : s.rig};
        throw std::invalid_argument("unknown scene id: " + config.scene_id);
    }
    if (!config.inline_scene)
        throw std::invalid_argument("config has neither scene id nor inline scene");
    Rig rig = config.explicit_rig
                  ? *config.explicit_rig
                  : make_hemisphere_rig(hash_combine(config.seed, 99),
                                        config.rig_params);
    return {*config.inline_scene, rig};
}

}  // namespace

SceneContext build_scene_context(const ExperimentConfig& config,
                                 int n_refs_override) {
    validate_config(config);

    SceneContext ctx;
    auto [scene, rig] = resolve_scene(config);
    ctx.scene_name = config.scene_id.empty() ? "inline" : config.scene_id;
    ctx.scene = std::move(scene);
    ctx.rig = std::move(rig);
    if (n_refs_override >= 0 &&
        n_refs_override < static_cast<int>(ctx.rig.refs.size()))
        ctx.rig.refs.resize(n_refs_override);

    AnalyticField field(ctx.scene);
    SamplerConfig oracle_cfg;
    oracle_cfg.kind = SamplerKind::kStratified;
    oracle_cfg.n_stratified = config.oracle_samples;
    oracle_cfg.eps_bg = config.eps_bg;

    ctx.ref_images.reserve(ctx.rig.refs.size());
    for (size_t i = 0; i < ctx.rig.refs.size(); ++i) {
        SamplerConfig ref_cfg = oracle_cfg;
        ref_cfg.seed = hash_combine(config.seed, kRefSeedBase + i);
        RenderResult r = render_view(field, ctx.rig.refs[i], ctx.rig.t_near,
                                     ctx.rig.t_far, ref_cfg, ctx.scene.background,
                                     config.threads);
        ctx.ref_images.push_back({ctx.rig.refs[i], std::move(r.image.color)});
    }

    oracle_cfg.seed = hash_combine(config.seed, kOracleSeed);
    RenderResult target = render_view(field, ctx.rig.target, ctx.rig.t_near,
                                      ctx.rig.t_far, oracle_cfg,
                                      ctx.scene.background, config.threads);
    ctx.oracle_image = std::move(target.image);

    ctx.gt_depth = analytic_depth_map(ctx.scene, ctx.rig.target, ctx.rig.t_near,
                                      ctx.rig.t_far, config.threads);
    return ctx;
}

DepthMap coarse_depth_for_target(const ExperimentConfig& config,
                                 const SceneContext& context, int n_views) {
    DepthMap dc;
    if (config.coarse_depth.source == CoarseDepthSource::kAnalytic) {
        dc = context.gt_depth;
    } else {
        double near = config.coarse_depth.range_near > 0.0
                          ? config.coarse_depth.range_near
                          : context.rig.t_near;
        double far = config.coarse_depth.range_far > 0.0
                         ? config.coarse_depth.range_far
                         : context.rig.t_far;
        if (near <= 0.0)
            near = std::max(near, 1e-3);
        std::vector<double> hypotheses =
            inverse_depth_hypotheses(near, far, config.coarse_depth.hypotheses);

        std::vector<PosedImage> refs = context.ref_images;
        if (n_views >= 2 && n_views < static_cast<int>(refs.size()))
            refs.resize(n_views);

        CostVolumeParams params;
        params.box_filter = config.coarse_depth.box_filter;
        CostVolume volume =
            build_cost_volume(context.rig.target, refs, hypotheses, params);
        dc = regress_depth(volume, config.coarse_depth.tau);
    }

    if (config.dc_noise > 0.0) {
        Rng rng(hash_combine(config.seed, kNoiseSeed));
        for (auto& d : dc.depth) {
            double n = rng.normal();
            if (!is_background(d))
                d = std::max(1e-6, d + config.dc_noise * n);
        }
    }
    return dc;
}

ArmReport run_arm(const ExperimentConfig& config, const SceneContext& context,
                  const ArmConfig& arm, int n_views) {
    ArmReport report;
    report.arm = arm;

    auto start = std::chrono::steady_clock::now();
    try {
        std::vector<PosedImage> refs = context.ref_images;
        if (n_views >= 0 && n_views < static_cast<int>(refs.size()))
            refs.resize(n_views);

        AnalyticField analytic(context.scene);
        std::unique_ptr<PhotoconsistencyField> photo;
        const Field* field = &analytic;
        if (config.field == FieldChoice::kPhotoconsistency) {
            photo = std::make_unique<PhotoconsistencyField>(refs, config.photo);
            field = photo.get();
        }

        SamplerConfig sampler;
        sampler.kind = arm.sampler;
        sampler.n_stratified = arm.n_stratified;
        sampler.n_coarse = arm.n_coarse;
        sampler.n_dynamic = arm.n_dynamic;
        sampler.delta_d = config.delta_d;
        sampler.eps_bg = config.eps_bg;
        sampler.seed = hash_combine(config.seed, kArmSeed);

        DepthMap dc;
        if (arm.sampler == SamplerKind::kGads) {
            dc = coarse_depth_for_target(config, context, n_views);
            sampler.coarse_depth = &dc;
        }

        RenderResult render =
            render_view(*field, context.rig.target, context.rig.t_near,
                        context.rig.t_far, sampler, context.scene.background,
                        config.threads);

        report.image = image_metrics(render.image.color, context.oracle_image.color);
        MscParams msc_params;
        msc_params.levels = config.msc_levels;
        report.image.msc =
            msc(render.image.color, context.oracle_image.color, msc_params);
        report.composite = composite_score(report.image.mse, report.image.msc,
                                           config.alpha, config.beta);
        try {
            report.depth = depth_metrics(render.depth, context.gt_depth);
            report.depth_ok = true;
        } catch (const NoDataError&) {
            report.depth_ok = false;
        }
        report.field_evaluations = render.field_evaluations;
        report.rendered_image = std::move(render.image);
        report.rendered_depth = std::move(render.depth);
        report.ok = true;
    } catch (const std::exception& e) {
        report.ok = false;
        report.error = e.what();
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

std::string report_csv_header() {
    return "scene,arm,sampler,n_total,n_coarse,n_dynamic,delta_d,field_evals,"
           "mse,psnr,ssim,msc,composite,abs_rel,sq_rel,rmse,delta1,delta2,"
           "delta3,valid_depth_px,ok";
}

std::string report_csv_row(const ExperimentReport& report, const ArmReport& arm,
                           double delta_d) {
    std::ostringstream row;
    bool gads = arm.arm.sampler == SamplerKind::kGads;
    row << sanitize_name(report.scene_name) << ',' << sanitize_name(arm.arm.name)
        << ',' << (gads ? "gads" : "stratified") << ',' << arm.arm.total_samples()
        << ',' << (gads ? arm.arm.n_coarse : 0) << ','
        << (gads ? arm.arm.n_dynamic : 0) << ',' << (gads ? fmt(delta_d) : "0")
        << ',' << arm.field_evaluations << ',';
    if (arm.ok) {
        row << fmt(arm.image.mse) << ',' << fmt(arm.image.psnr) << ','
            << fmt(arm.image.ssim) << ',' << fmt(arm.image.msc) << ','
            << fmt(arm.composite) << ',';
        if (arm.depth_ok) {
            row << fmt(arm.depth.abs_rel) << ',' << fmt(arm.depth.sq_rel) << ','
                << fmt(arm.depth.rmse) << ',' << fmt(arm.depth.delta1) << ','
                << fmt(arm.depth.delta2) << ',' << fmt(arm.depth.delta3) << ','
                << arm.depth.valid_pixels << ',';
        } else {
            row << "nan,nan,nan,nan,nan,nan,0,";
        }
        row << 1;
    } else {
        row << "nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,0,0";
    }
    return row.str();
}

namespace {

void write_arm_outputs(const std::string& dir, const std::string& scene_name,
                       size_t arm_index, const ArmReport& report) {
    if (!report.ok)
        return;
    std::string base = dir + "/" + sanitize_name(scene_name) + "_arm" +
                       std::to_string(arm_index) + "_" +
                       sanitize_name(report.arm.name);
    write_ppm(base + ".ppm", report.rendered_image.color);
    write_depth_raw(base + "_depth.f32", report.rendered_depth);
}

void write_context_outputs(const std::string& dir, const SceneContext& ctx) {
    std::string base = dir + "/" + sanitize_name(ctx.scene_name);
    write_ppm(base + "_oracle.ppm", ctx.oracle_image.color);
    write_depth_raw(base + "_gt_depth.f32", ctx.gt_depth);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    SceneContext ctx = build_scene_context(config);

    ExperimentReport report;
    report.scene_name = ctx.scene_name;

    std::string dir = resolve_output_dir(config.output_dir);
    if (config.write_images) {
        std::filesystem::create_directories(dir);
        write_context_outputs(dir, ctx);
    }

    for (size_t i = 0; i < config.arms.size(); ++i) {
        ArmReport arm_report = run_arm(config, ctx, config.arms[i]);
        std::cout << ctx.scene_name << " / " << config.arms[i].name << ": "
                  << (arm_report.ok ? "ok" : ("FAILED: " + arm_report.error))
                  << " (" << fmt(arm_report.wall_seconds) << " s, "
                  << arm_report.field_evaluations << " field evals)\n";
        if (config.write_images)
            write_arm_outputs(dir, ctx.scene_name, i, arm_report);
        report.arms.push_back(std::move(arm_report));
    }

    if (config.write_images) {
        std::ofstream csv(dir + "/" + sanitize_name(ctx.scene_name) +
                          "_metrics.csv");
        csv << report_csv_header() << "\n";
        for (const auto& arm : report.arms)
            csv << report_csv_row(report, arm, config.delta_d) << "\n";
    }
    return report;
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& config,
                                    const std::string& axis,
                                    const std::vector<double>& values) {
    validate_config(config);
    if (values.empty())
        throw std::invalid_argument("sweep: at least one value required");
    if (axis != "delta_d" && axis != "n_samples" && axis != "n_views")
        throw std::invalid_argument("sweep: unknown axis '" + axis + "'");

    int max_views = config.explicit_rig
                        ? static_cast<int>(config.explicit_rig->refs.size())
                        : config.rig_params.n_refs;
    ExperimentConfig base = config;
    if (axis == "n_views") {
        for (double v : values) {
            int n = static_cast<int>(v);
            if (n < 2)
                throw std::invalid_argument("sweep: n_views values must be >= 2");
            max_views = std::max(max_views, n);
        }
        base.rig_params.n_refs = max_views;
    }

    SceneContext ctx = build_scene_context(base);
    std::string dir = resolve_output_dir(config.output_dir);
    std::filesystem::create_directories(dir);

    std::vector<ExperimentReport> reports;
    std::ofstream csv(dir + "/sweep_" + axis + ".csv");
    csv << axis << "," << report_csv_header() << "\n";

    for (double value : values) {
        ExperimentConfig run = base;
        int n_views = -1;
        if (axis == "delta_d") {
            run.delta_d = value;
        } else if (axis == "n_samples") {
            int total = static_cast<int>(value);
            for (auto& arm : run.arms) {
                if (arm.sampler == SamplerKind::kStratified) {
                    arm.n_stratified = total;
                } else {
                    arm.n_coarse = total / 2;
                    arm.n_dynamic = total - total / 2;
                }
            }
        } else {
            n_views = static_cast<int>(value);
        }

        ExperimentReport report;
        report.scene_name = ctx.scene_name;
        for (size_t i = 0; i < run.arms.size(); ++i) {
            ArmReport arm_report = run_arm(run, ctx, run.arms[i], n_views);
            std::cout << axis << "=" << fmt(value) << " " << run.arms[i].name
                      << ": " << (arm_report.ok ? "ok" : "FAILED") << " ("
                      << fmt(arm_report.wall_seconds) << " s)\n";
            csv << fmt(value) << ","
                << report_csv_row(report, arm_report, run.delta_d) << "\n";
            if (config.write_images) {
                std::string subdir = dir + "/" + axis + "_" + fmt(value);
                std::filesystem::create_directories(subdir);
                write_arm_outputs(subdir, ctx.scene_name, i, arm_report);
            }
            report.arms.push_back(std::move(arm_report));
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("expected a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json texture_to_json(const Texture& t) {
    json j;
    switch (t.kind) {
        case Texture::Kind::kSolid: j["kind"] = "solid"; break;
        case Texture::Kind::kChecker: j["kind"] = "checker"; break;
        case Texture::Kind::kNoise: j["kind"] = "noise"; break;
    }
    j["color_a"] = vec3_to_json(t.color_a);
    j["color_b"] = vec3_to_json(t.color_b);
    j["scale"] = t.scale;
    j["octaves"] = t.octaves;
    j["seed"] = t.seed;
    return j;
}

Texture texture_from_json(const json& j) {
    Texture t;
    std::string kind = j.value("kind", "solid");
    if (kind == "solid")
        t.kind = Texture::Kind::kSolid;
    else if (kind == "checker")
        t.kind = Texture::Kind::kChecker;
    else if (kind == "noise")
        t.kind = Texture::Kind::kNoise;
    else
        throw std::invalid_argument("texture.kind: unknown '" + kind + "'");
    if (j.contains("color_a"))
        t.color_a = vec3_from_json(j["color_a"]);
    if (j.contains("color_b"))
        t.color_b = vec3_from_json(j["color_b"]);
    t.scale = j.value("scale", 1.0);
    t.octaves = j.value("octaves", 2);
    t.seed = j.value("seed", 0ull);
    return t;
}

json primitive_to_json(const Primitive& p) {
    json j;
    switch (p.shape) {
        case Primitive::Shape::kSphere: j["shape"] = "sphere"; break;
        case Primitive::Shape::kBox: j["shape"] = "box"; break;
        case Primitive::Shape::kGaussianBlob: j["shape"] = "blob"; break;
    }
    j["center"] = vec3_to_json(p.center);
    j["size"] = vec3_to_json(p.size);
    j["sigma_max"] = p.sigma_max;
    j["texture"] = texture_to_json(p.texture);
    return j;
}

Primitive primitive_from_json(const json& j) {
    Primitive p;
    std::string shape = j.value("shape", "sphere");
    if (shape == "sphere")
        p.shape = Primitive::Shape::kSphere;
    else if (shape == "box")
        p.shape = Primitive::Shape::kBox;
    else if (shape == "blob")
        p.shape = Primitive::Shape::kGaussianBlob;
    else
        throw std::invalid_argument("primitive.shape: unknown '" + shape + "'");
    if (j.contains("center"))
        p.center = vec3_from_json(j["center"]);
    if (j.contains("size"))
        p.size = vec3_from_json(j["size"]);
    else if (j.contains("radius"))
        p.size = Vec3::Constant(j["radius"].get<double>());
    else if (j.contains("stddev"))
        p.size = Vec3::Constant(j["stddev"].get<double>());
    p.sigma_max = j.value("sigma_max", 1.0);
    if (p.sigma_max < 0.0)
        throw std::invalid_argument("primitive.sigma_max: must be >= 0");
    if (j.contains("texture"))
        p.texture = texture_from_json(j["texture"]);
    return p;
}

json scene_to_json(const SceneDescription& s) {
    json j;
    j["background"] = vec3_to_json(s.background);
    if (s.tint_strength != 0.0) {
        j["tint_strength"] = s.tint_strength;
        j["tint_direction"] = vec3_to_json(s.tint_direction);
    }
    j["primitives"] = json::array();
    for (const auto& p : s.primitives)
        j["primitives"].push_back(primitive_to_json(p));
    return j;
}

SceneDescription scene_from_json(const json& j) {
    SceneDescription s;
    if (j.contains("background"))
        s.background = vec3_from_json(j["background"]);
    s.tint_strength = j.value("tint_strength", 0.0);
    if (j.contains("tint_direction"))
        s.tint_direction = vec3_from_json(j["tint_direction"]).normalized();
    if (j.contains("primitives"))
        for (const auto& p : j["primitives"])
            s.primitives.push_back(primitive_from_json(p));
    return s;
}

json camera_to_json(const Camera& c) {
    json j;
    j["intrinsics"] = {{"fx", c.intrinsics.fx},     {"fy", c.intrinsics.fy},
                       {"cx", c.intrinsics.cx},     {"cy", c.intrinsics.cy},
                       {"width", c.intrinsics.width},
                       {"height", c.intrinsics.height}};
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col)
            rot.push_back(c.pose.rotation(r, col));
    j["pose"] = {{"rotation", rot},
                 {"translation", json::array({c.pose.translation.x(),
                                              c.pose.translation.y(),
                                              c.pose.translation.z()})}};
    return j;
}

Camera camera_from_json(const json& j) {
    CameraIntrinsics k;
    const json& intr = j.at("intrinsics");
    k.fx = intr.at("fx").get<double>();
    k.fy = intr.at("fy").get<double>();
    k.cx = intr.at("cx").get<double>();
    k.cy = intr.at("cy").get<double>();
    k.width = intr.at("width").get<int>();
    k.height = intr.at("height").get<int>();

    Pose pose;
    const json& pj = j.at("pose");
    const json& rot = pj.at("rotation");
    if (!rot.is_array() || rot.size() != 9)
        throw std::invalid_argument("pose.rotation: expected 9 row-major entries");
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col)
            pose.rotation(r, col) = rot[static_cast<size_t>(r) * 3 + col].get<double>();
    pose.translation = vec3_from_json(pj.at("translation"));
    return Camera(k, pose);
}

SamplerKind sampler_from_string(const std::string& s) {
    if (s == "stratified")
        return SamplerKind::kStratified;
    if (s == "gads")
        return SamplerKind::kGads;
    throw std::invalid_argument("sampler: unknown '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    ExperimentConfig cfg;
    cfg.schema_version = j.value("schema_version", 0);
    cfg.seed = j.value("seed", 7ull);

    if (j.contains("scene")) {
        const json& sc = j["scene"];
        if (sc.contains("id")) {
            cfg.scene_id = sc["id"].get<std::string>();
        } else {
            cfg.scene_id.clear();
            cfg.inline_scene = scene_from_json(sc);
        }
    }

    if (j.contains("rig")) {
        const json& r = j["rig"];
        if (r.contains("target")) {
            Rig rig;
            rig.target = camera_from_json(r.at("target"));
            for (const auto& c : r.at("refs"))
                rig.refs.push_back(camera_from_json(c));
            rig.t_near = r.value("near", 1.0);
            rig.t_far = r.value("far", 7.5);
            cfg.explicit_rig = std::move(rig);
            cfg.rig_params.t_near = cfg.explicit_rig->t_near;
            cfg.rig_params.t_far = cfg.explicit_rig->t_far;
        } else {
            cfg.rig_params.n_refs = r.value("n_refs", 5);
            cfg.rig_params.image_width = r.value("width", 128);
            cfg.rig_params.image_height = r.value("height", 128);
            cfg.rig_params.fov_deg = r.value("fov_deg", 45.0);
            cfg.rig_params.radius = r.value("radius", 4.0);
            cfg.rig_params.t_near = r.value("near", 1.0);
            cfg.rig_params.t_far = r.value("far", 7.5);
        }
    }

    cfg.oracle_samples = j.value("oracle_samples", 4096);
    cfg.delta_d = j.value("delta_d", 0.8);
    cfg.dc_noise = j.value("dc_noise", 0.0);

    if (j.contains("coarse_depth")) {
        const json& cd = j["coarse_depth"];
        cfg.coarse_depth.hypotheses = cd.value("hypotheses", 64);
        cfg.coarse_depth.tau = cd.value("tau", 0.002);
        cfg.coarse_depth.box_filter = cd.value("box_filter", false);
        std::string source = cd.value("source", "planesweep");
        if (source == "planesweep")
            cfg.coarse_depth.source = CoarseDepthSource::kPlaneSweep;
        else if (source == "analytic")
            cfg.coarse_depth.source = CoarseDepthSource::kAnalytic;
        else
            throw std::invalid_argument("coarse_depth.source: unknown '" + source +
                                        "'");
        cfg.coarse_depth.range_near = cd.value("range_near", 0.0);
        cfg.coarse_depth.range_far = cd.value("range_far", 0.0);
    }

    if (j.contains("fusion")) {
        std::string scheme = j["fusion"].value("scheme", "var");
        if (scheme == "uniform")
            cfg.photo.fusion = FusionScheme::kUniform;
        else if (scheme == "var")
            cfg.photo.fusion = FusionScheme::kVarianceSoftmax;
        else if (scheme == "angle")
            cfg.photo.fusion = FusionScheme::kAngleSoftmax;
        else
            throw std::invalid_argument("fusion.scheme: unknown '" + scheme + "'");
        cfg.photo.fusion_tau = j["fusion"].value("tau", 0.05);
    }
    if (j.contains("photo")) {
        cfg.photo.tau = j["photo"].value("tau", 0.01);
        cfg.photo.sigma_scale = j["photo"].value("sigma_scale", 50.0);
    }

    std::string field = j.value("field", "analytic");
    if (field == "analytic")
        cfg.field = FieldChoice::kAnalytic;
    else if (field == "photo")
        cfg.field = FieldChoice::kPhotoconsistency;
    else
        throw std::invalid_argument("field: unknown '" + field + "'");

    cfg.eps_bg = j.value("eps_bg", 1e-3);
    cfg.msc_levels = j.value("msc_levels", 3);
    cfg.alpha = j.value("alpha", 1.0);
    cfg.beta = j.value("beta", 1.0);
    cfg.threads = j.value("threads", 0);
    cfg.output_dir = j.value("output_dir", "out");
    cfg.write_images = j.value("write_images", true);

    if (j.contains("arms")) {
        for (const auto& a : j["arms"]) {
            ArmConfig arm;
            arm.name = a.value("name", "");
            arm.sampler = sampler_from_string(a.value("sampler", "stratified"));
            arm.n_stratified = a.value("n", 64);
            arm.n_coarse = a.value("n_coarse", 24);
            arm.n_dynamic = a.value("n_dynamic", 24);
            if (arm.name.empty()) {
                arm.name = (arm.sampler == SamplerKind::kGads)
                               ? "gads" + std::to_string(arm.total_samples())
                               : "stratified" + std::to_string(arm.total_samples());
            }
            cfg.arms.push_back(std::move(arm));
        }
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["seed"] = cfg.seed;
    if (!cfg.scene_id.empty())
        j["scene"] = {{"id", cfg.scene_id}};
    else if (cfg.inline_scene)
        j["scene"] = scene_to_json(*cfg.inline_scene);

    if (cfg.explicit_rig) {
        json r;
        r["near"] = cfg.explicit_rig->t_near;
        r["far"] = cfg.explicit_rig->t_far;
        r["target"] = camera_to_json(cfg.explicit_rig->target);
        r["refs"] = json::array();
        for (const auto& c : cfg.explicit_rig->refs)
            r["refs"].push_back(camera_to_json(c));
        j["rig"] = std::move(r);
    } else {
        j["rig"] = {{"n_refs", cfg.rig_params.n_refs},
                    {"width", cfg.rig_params.image_width},
                    {"height", cfg.rig_params.image_height},
                    {"fov_deg", cfg.rig_params.fov_deg},
                    {"radius", cfg.rig_params.radius},
                    {"near", cfg.rig_params.t_near},
                    {"far", cfg.rig_params.t_far}};
    }

    j["oracle_samples"] = cfg.oracle_samples;
    j["delta_d"] = cfg.delta_d;
    j["dc_noise"] = cfg.dc_noise;
    j["coarse_depth"] = {
        {"hypotheses", cfg.coarse_depth.hypotheses},
        {"tau", cfg.coarse_depth.tau},
        {"box_filter", cfg.coarse_depth.box_filter},
        {"source", cfg.coarse_depth.source == CoarseDepthSource::kPlaneSweep
                       ? "planesweep"
                       : "analytic"},
        {"range_near", cfg.coarse_depth.range_near},
        {"range_far", cfg.coarse_depth.range_far}};
    const char* scheme = "var";
    if (cfg.photo.fusion == FusionScheme::kUniform)
        scheme = "uniform";
    else if (cfg.photo.fusion == FusionScheme::kAngleSoftmax)
        scheme = "angle";
    j["fusion"] = {{"scheme", scheme}, {"tau", cfg.photo.fusion_tau}};
    j["photo"] = {{"tau", cfg.photo.tau}, {"sigma_scale", cfg.photo.sigma_scale}};
    j["field"] = cfg.field == FieldChoice::kAnalytic ? "analytic" : "photo";
    j["eps_bg"] = cfg.eps_bg;
    j["msc_levels"] = cfg.msc_levels;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["threads"] = cfg.threads;
    j["arms"] = json::array();
    for (const auto& arm : cfg.arms) {
        json a;
        a["name"] = arm.name;
        if (arm.sampler == SamplerKind::kGads) {
            a["sampler"] = "gads";
            a["n_coarse"] = arm.n_coarse;
            a["n_dynamic"] = arm.n_dynamic;
        } else {
            a["sampler"] = "stratified";
            a["n"] = arm.n_stratified;
        }
        j["arms"].push_back(std::move(a));
    }
    j["output_dir"] = cfg.output_dir;
    j["write_images"] = cfg.write_images;
    return j;
}

}  // namespace

void save_config(const std::string& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << config_to_json(config).dump(2) << "\n";
}

void save_scene_dump(const std::string& path, const SuiteScene& suite_scene,
                     std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.scene_id.clear();
    cfg.inline_scene = suite_scene.scene;
    cfg.explicit_rig = suite_scene.rig;
    ArmConfig strat;
    strat.name = "stratified64";
    strat.sampler = SamplerKind::kStratified;
    strat.n_stratified = 64;
    ArmConfig gads;
    gads.name = "gads48";
    gads.sampler = SamplerKind::kGads;
    gads.n_coarse = 24;
    gads.n_dynamic = 24;
    cfg.arms = {strat, gads};
    save_config(path, cfg);
}

}  // namespace vren

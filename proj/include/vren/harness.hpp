#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vren/coarse_depth.hpp"
#include "vren/fields.hpp"
#include "vren/geometry.hpp"
#include "vren/image.hpp"
#include "vren/metrics.hpp"
#include "vren/render_view.hpp"

namespace vren {

inline constexpr int kConfigSchemaVersion = 1;

// Environment variable overriding the root of all experiment outputs.
inline constexpr const char* kOutputRootEnv = "VREN_OUTPUT_ROOT";

struct RigParams {
    int n_refs = 5;
    int image_width = 128;
    int image_height = 128;
    double fov_deg = 45.0;
    double radius = 4.0;
    double t_near = 1.0;
    double t_far = 7.5;
};

struct Rig {
    Camera target;
    std::vector<Camera> refs;
    double t_near = 1.0;
    double t_far = 7.5;
};

struct SuiteScene {
    std::string name;
    SceneDescription scene;
    Rig rig;
};

// Deterministic scene suite: a textured sphere on a ground plane, two
// occluding boxes, and a gaussian-blob cluster, each with a hemisphere rig
// of reference views around one target view.
std::vector<SuiteScene> make_scene_suite(std::uint64_t seed,
                                         const RigParams& params = {});

// Target plus reference cameras on a hemisphere looking at the origin. The
// first k reference placements are shared across n_refs counts, so view
// sets nest.
Rig make_hemisphere_rig(std::uint64_t seed, const RigParams& params);

struct ArmConfig {
    std::string name;
    SamplerKind sampler = SamplerKind::kStratified;
    int n_stratified = 64;
    int n_coarse = 24;
    int n_dynamic = 24;

    int total_samples() const {
        return sampler == SamplerKind::kStratified ? n_stratified
                                                   : n_coarse + n_dynamic;
    }
};

enum class FieldChoice { kAnalytic, kPhotoconsistency };
enum class CoarseDepthSource { kPlaneSweep, kAnalytic };

struct CoarseDepthConfig {
    int hypotheses = 64;
    double tau = 0.002;
    bool box_filter = false;
    CoarseDepthSource source = CoarseDepthSource::kPlaneSweep;
    // 0 falls back to the rig near/far bounds.
    double range_near = 0.0;
    double range_far = 0.0;
};

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    std::uint64_t seed = 7;
    std::string scene_id = "sphere_plane";   // suite scene; empty for inline
    std::optional<SceneDescription> inline_scene;
    RigParams rig_params;
    std::optional<Rig> explicit_rig;
    int oracle_samples = 4096;
    double delta_d = 0.8;
    double dc_noise = 0.0;  // stddev of noise injected into coarse depth
    CoarseDepthConfig coarse_depth;
    PhotoFieldParams photo;  // fusion scheme and taus
    FieldChoice field = FieldChoice::kAnalytic;
    double eps_bg = 1e-3;
    int msc_levels = 3;
    double alpha = 1.0, beta = 1.0;  // composite score coefficients
    int threads = 0;
    std::vector<ArmConfig> arms;
    std::string output_dir = "out";
    bool write_images = true;
};

struct ArmReport {
    ArmConfig arm;
    bool ok = false;
    std::string error;
    ImageMetrics image;       // vs the dense oracle render, msc filled
    double composite = 0.0;
    bool depth_ok = false;    // false when no valid depth pixels exist
    DepthMetrics depth;       // vs the analytic ground truth
    std::uint64_t field_evaluations = 0;
    double wall_seconds = 0.0;  // console log only; never written to CSV
    RenderedImage rendered_image;
    DepthMap rendered_depth;
};

struct ExperimentReport {
    std::string scene_name;
    std::vector<ArmReport> arms;

    bool all_ok() const {
        for (const auto& a : arms)
            if (!a.ok)
                return false;
        return !arms.empty();
    }
};

// Reference renders, the dense oracle target render, and the analytic
// ground-truth depth for one configured scene; shared across arms and
// sweep values.
struct SceneContext {
    std::string scene_name;
    SceneDescription scene;
    Rig rig;
    std::vector<PosedImage> ref_images;
    RenderedImage oracle_image;
    DepthMap gt_depth;
};

// Throws std::invalid_argument listing every problem by config path.
void validate_config(const ExperimentConfig& config);

SceneContext build_scene_context(const ExperimentConfig& config,
                                 int n_refs_override = -1);

// Plane-sweep (or analytic) coarse depth for the target view, with the
// configured noise injected into non-background pixels.
DepthMap coarse_depth_for_target(const ExperimentConfig& config,
                                 const SceneContext& context, int n_views = -1);

ArmReport run_arm(const ExperimentConfig& config, const SceneContext& context,
                  const ArmConfig& arm, int n_views = -1);

// Renders the oracle and every arm, writes images, depth maps, and the
// metrics CSV under the output directory. Per-arm failures are recorded and
// remaining arms still run.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Axis is one of "delta_d", "n_samples", "n_views". One report per value
// with a shared seed; the combined CSV carries the axis value as leading
// column.
std::vector<ExperimentReport> sweep(const ExperimentConfig& config,
                                    const std::string& axis,
                                    const std::vector<double>& values);

// Config file I/O (JSON). Loading validates the schema_version key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
void save_config(const std::string& path, const ExperimentConfig& config);

// Writes a complete runnable config with the suite scene inlined and the
// rig cameras explicit.
void save_scene_dump(const std::string& path, const SuiteScene& suite_scene,
                     std::uint64_t seed);

// Stable CSV schema; documented in the README.
std::string report_csv_header();
std::string report_csv_row(const ExperimentReport& report, const ArmReport& arm,
                           double delta_d);

// Output directory after applying the environment override.
std::string resolve_output_dir(const std::string& configured);

}  // namespace vren

#pragma once

#include <cstdint>

#include "vren/fields.hpp"
#include "vren/geometry.hpp"
#include "vren/image.hpp"
#include "vren/sampling.hpp"

namespace vren {

enum class SamplerKind { kStratified, kGads };

struct SamplerConfig {
    SamplerKind kind = SamplerKind::kStratified;
    int n_stratified = 64;           // stratified sampler
    int n_coarse = 24;               // gads: uniform pre-samples
    int n_dynamic = 24;              // gads: predict-then-refine samples
    double delta_d = 0.8;            // interval half-width around coarse depth
    const DepthMap* coarse_depth = nullptr;  // gads; full ray when null
    std::uint64_t seed = 0;
    double eps_bg = 1e-3;            // background opacity threshold

    int total_samples() const {
        return kind == SamplerKind::kStratified ? n_stratified
                                                : n_coarse + n_dynamic;
    }
};

struct RenderResult {
    RenderedImage image;
    DepthMap depth;
    std::uint64_t field_evaluations = 0;
};

// Renders every pixel of the camera with the configured sampler. Per-pixel
// seeds derive from (seed, pixel index), so output is independent of the
// thread count. Per-pixel failures rethrow with the pixel coordinate.
RenderResult render_view(const Field& field, const Camera& camera, double t_near,
                         double t_far, const SamplerConfig& config,
                         const Vec3& background, int threads = 0);

}  // namespace vren

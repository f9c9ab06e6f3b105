#include "vren/render_view.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>

#include "vren/parallel.hpp"
#include "vren/rng.hpp"

namespace vren {

RenderResult render_view(const Field& field, const Camera& camera, double t_near,
                         double t_far, const SamplerConfig& config,
                         const Vec3& background, int threads) {
    const CameraIntrinsics& k = camera.intrinsics;
    if (config.kind == SamplerKind::kGads && config.coarse_depth) {
        if (config.coarse_depth->width != k.width ||
            config.coarse_depth->height != k.height)
            throw std::invalid_argument("render_view: coarse depth size mismatch");
    }

    RenderResult result;
    result.image.color = Image(k.width, k.height);
    result.image.opacity.assign(static_cast<size_t>(k.width) * k.height, 0.0);
    result.depth = DepthMap(k.width, k.height);

    CountingField counted(field);

    std::mutex failure_mutex;
    std::exception_ptr failure;

    parallel_for(0, k.height, threads, [&](int y) {
        for (int x = 0; x < k.width; ++x) {
            try {
                Ray ray = ray_for_pixel_center(k, camera.pose, x, y, t_near, t_far);
                std::uint64_t px_seed = hash_combine(
                    config.seed, static_cast<std::uint64_t>(y) * k.width + x);

                RaySamples samples;
                if (config.kind == SamplerKind::kStratified) {
                    samples.interval_lo = ray.t_near;
                    samples.t = stratified_samples(ray, config.n_stratified, px_seed);
                    samples.sigma.resize(samples.t.size());
                    samples.color.resize(samples.t.size());
                    for (size_t j = 0; j < samples.t.size(); ++j) {
                        FieldSample s =
                            counted.sample(ray.point_at(samples.t[j]), ray.direction);
                        samples.sigma[j] = s.sigma;
                        samples.color[j] = s.color;
                    }
                    compute_deltas(samples);
                } else {
                    double dc = kBackgroundDepth;
                    if (config.coarse_depth)
                        dc = config.coarse_depth->at(x, y);
                    SamplingInterval interval =
                        geometry_interval(dc, config.delta_d, ray.t_near, ray.t_far);
                    SamplerBudget budget{config.n_coarse, config.n_dynamic, px_seed};
                    samples = dynamic_samples(counted, ray, interval, budget);
                }

                compute_transmittances(samples);
                Vec3 color = composite_color(samples, background);
                result.image.color.at(x, y) = color.cwiseMax(0.0).cwiseMin(1.0);
                double opacity = 0.0;
                for (double w : samples.weight)
                    opacity += w;
                result.image.opacity[static_cast<size_t>(y) * k.width + x] =
                    std::clamp(opacity, 0.0, 1.0);
                result.depth.at(x, y) = fine_depth(samples, config.eps_bg);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::make_exception_ptr(std::runtime_error(
                        "render failed at pixel (" + std::to_string(x) + ", " +
                        std::to_string(y) + "): " + e.what()));
            }
        }
    });

    if (failure)
        std::rethrow_exception(failure);

    result.field_evaluations = counted.count();
    return result;
}

}  // namespace vren

#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "vren/fusion.hpp"
#include "vren/geometry.hpp"
#include "vren/image.hpp"

namespace vren {

struct FieldSample {
    double sigma = 0.0;          // density, >= 0
    Vec3 color = Vec3::Zero();   // channels in [0, 1]
};

// Queryable density/color field. Implementations must be safe for
// unrestricted concurrent reads.
class Field {
public:
    virtual ~Field() = default;
    virtual FieldSample sample(const Vec3& x, const Vec3& dir) const = 0;
};

struct Texture {
    enum class Kind { kSolid, kChecker, kNoise };
    Kind kind = Kind::kSolid;
    Vec3 color_a = Vec3(0.5, 0.5, 0.5);
    Vec3 color_b = Vec3(0.5, 0.5, 0.5);  // second checker color / noise ramp end
    double scale = 1.0;                  // feature size, scene units
    int octaves = 2;                     // value-noise octaves
    std::uint64_t seed = 0;
};

Vec3 texture_color(const Texture& tex, const Vec3& x);

struct Primitive {
    enum class Shape { kSphere, kBox, kGaussianBlob };
    Shape shape = Shape::kSphere;
    Vec3 center = Vec3::Zero();
    // Sphere: size.x = radius. Box: half extents. Blob: size.x = std dev.
    Vec3 size = Vec3::Ones();
    double sigma_max = 1.0;
    Texture texture;
};

struct SceneDescription {
    std::vector<Primitive> primitives;
    Vec3 background = Vec3::Zero();
    // Optional view-dependent tint: color *= 1 + strength * dot(dir, tint_dir).
    double tint_strength = 0.0;
    Vec3 tint_direction = Vec3::UnitZ();
};

// Density is the sum of primitive densities; color is the density-weighted
// mean of primitive colors at the point.
class AnalyticField final : public Field {
public:
    explicit AnalyticField(SceneDescription scene) : scene_(std::move(scene)) {}

    FieldSample sample(const Vec3& x, const Vec3& dir) const override;

    // Density-only path for integrators.
    double sigma_at(const Vec3& x) const;

    const SceneDescription& scene() const { return scene_; }

private:
    SceneDescription scene_;
};

inline FieldSample query_field(const SceneDescription& scene, const Vec3& x,
                               const Vec3& dir) {
    return AnalyticField(scene).sample(x, dir);
}

struct PhotoFieldParams {
    double tau = 0.01;         // variance falloff
    double sigma_scale = 50.0; // density at zero variance
    FusionScheme fusion = FusionScheme::kVarianceSoftmax;
    double fusion_tau = 0.05;
};

// Density from photometric agreement across posed views: points that
// project to consistent colors in >= 2 views get high density. Color is the
// fused multi-view color. The query direction serves as the target view
// direction for angle-based fusion.
class PhotoconsistencyField final : public Field {
public:
    PhotoconsistencyField(std::vector<PosedImage> views, PhotoFieldParams params);

    FieldSample sample(const Vec3& x, const Vec3& dir) const override;

    const std::vector<PosedImage>& views() const { return views_; }

private:
    std::vector<PosedImage> views_;
    PhotoFieldParams params_;
};

struct GroundTruthParams {
    int steps = 4096;       // uniform integration steps, >= 4096 for oracles
    double tol = 1e-6;      // bisection tolerance on t
    int refine_substeps = 32;
};

// First t where accumulated transmittance T(t) = exp(-integral of sigma)
// crosses 0.5; kBackgroundDepth when T never drops below 0.5. Computed by
// uniform midpoint integration plus within-step bisection.
double ground_truth_depth(const AnalyticField& field, const Ray& ray,
                          const GroundTruthParams& params = {});

inline double ground_truth_depth(const SceneDescription& scene, const Ray& ray,
                                 const GroundTruthParams& params = {}) {
    return ground_truth_depth(AnalyticField(scene), ray, params);
}

// Field decorator counting evaluations; used for sample-budget accounting.
class CountingField final : public Field {
public:
    explicit CountingField(const Field& inner) : inner_(inner) {}

    FieldSample sample(const Vec3& x, const Vec3& dir) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return inner_.sample(x, dir);
    }

    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

private:
    const Field& inner_;
    mutable std::atomic<std::uint64_t> count_{0};
};

}  // namespace vren

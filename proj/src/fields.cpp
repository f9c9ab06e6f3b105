#include "vren/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vren/rng.hpp"

namespace vren {

namespace {

double lattice_value(std::uint64_t seed, long ix, long iy, long iz) {
    std::uint64_t h = seed;
    h = hash_combine(h, static_cast<std::uint64_t>(ix));
    h = hash_combine(h, static_cast<std::uint64_t>(iy));
    h = hash_combine(h, static_cast<std::uint64_t>(iz));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Trilinearly interpolated value noise on an integer lattice, in [0, 1].
double value_noise(std::uint64_t seed, const Vec3& p) {
    double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
    long ix = static_cast<long>(fx), iy = static_cast<long>(fy),
         iz = static_cast<long>(fz);
    double tx = smoothstep(p.x() - fx);
    double ty = smoothstep(p.y() - fy);
    double tz = smoothstep(p.z() - fz);

    double c[2][2][2];
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
                c[dz][dy][dx] = lattice_value(seed, ix + dx, iy + dy, iz + dz);

    double x00 = c[0][0][0] + tx * (c[0][0][1] - c[0][0][0]);
    double x10 = c[0][1][0] + tx * (c[0][1][1] - c[0][1][0]);
    double x01 = c[1][0][0] + tx * (c[1][0][1] - c[1][0][0]);
    double x11 = c[1][1][0] + tx * (c[1][1][1] - c[1][1][0]);
    double y0 = x00 + ty * (x10 - x00);
    double y1 = x01 + ty * (x11 - x01);
    return y0 + tz * (y1 - y0);
}

}  // namespace

Vec3 texture_color(const Texture& tex, const Vec3& x) {
    switch (tex.kind) {
        case Texture::Kind::kSolid:
            return tex.color_a;
        case Texture::Kind::kChecker: {
            long parity = 0;
            for (int d = 0; d < 3; ++d)
                parity += static_cast<long>(std::floor(x[d] / tex.scale));
            return ((parity & 1) == 0) ? tex.color_a : tex.color_b;
        }
        case Texture::Kind::kNoise: {
            double amplitude = 1.0, frequency = 1.0, sum = 0.0, norm = 0.0;
            for (int o = 0; o < std::max(1, tex.octaves); ++o) {
                sum += amplitude *
                       value_noise(hash_combine(tex.seed, o), x * frequency / tex.scale);
                norm += amplitude;
                amplitude *= 0.5;
                frequency *= 2.0;
            }
            double t = sum / norm;
            return tex.color_a + t * (tex.color_b - tex.color_a);
        }
    }
    return tex.color_a;
}

namespace {

double primitive_sigma(const Primitive& p, const Vec3& x) {
    switch (p.shape) {
        case Primitive::Shape::kSphere: {
            double r = p.size.x();
            return ((x - p.center).squaredNorm() <= r * r) ? p.sigma_max : 0.0;
        }
        case Primitive::Shape::kBox: {
            Vec3 d = (x - p.center).cwiseAbs() - p.size;
            return (d.maxCoeff() <= 0.0) ? p.sigma_max : 0.0;
        }
        case Primitive::Shape::kGaussianBlob: {
            double s = p.size.x();
            double q = (x - p.center).squaredNorm() / (2.0 * s * s);
            if (q > 30.0)
                return 0.0;  // below 1e-13 of the peak
            return p.sigma_max * std::exp(-q);
        }
    }
    return 0.0;
}

}  // namespace

double AnalyticField::sigma_at(const Vec3& x) const {
    double sigma = 0.0;
    for (const auto& p : scene_.primitives)
        sigma += primitive_sigma(p, x);
    return sigma;
}

FieldSample AnalyticField::sample(const Vec3& x, const Vec3& dir) const {
    FieldSample out;
    Vec3 weighted = Vec3::Zero();
    for (const auto& p : scene_.primitives) {
        double s = primitive_sigma(p, x);
        if (s <= 0.0)
            continue;
        out.sigma += s;
        weighted += s * texture_color(p.texture, x);
    }
    if (out.sigma > 0.0) {
        out.color = weighted / out.sigma;
        if (scene_.tint_strength != 0.0) {
            double gain =
                1.0 + scene_.tint_strength * dir.dot(scene_.tint_direction);
            out.color = (out.color * gain).cwiseMax(0.0).cwiseMin(1.0);
        }
    }
    return out;
}

PhotoconsistencyField::PhotoconsistencyField(std::vector<PosedImage> views,
                                             PhotoFieldParams params)
    : views_(std::move(views)), params_(params) {
    if (!(params_.tau > 0.0) || !(params_.sigma_scale >= 0.0))
        throw std::invalid_argument("photo field: tau > 0 and sigma_scale >= 0 required");
}

FieldSample PhotoconsistencyField::sample(const Vec3& x, const Vec3& dir) const {
    FieldSample out;
    auto fetches = fetch_views(x, views_, FetchDescriptor::kColor);

    int n_valid = 0;
    Vec3 mean = Vec3::Zero();
    for (const auto& f : fetches) {
        if (!f.valid)
            continue;
        ++n_valid;
        mean += Vec3(f.value[0], f.value[1], f.value[2]);
    }
    if (n_valid < 2)
        return out;  // sigma 0, free space
    mean /= n_valid;

    double variance = 0.0;
    for (const auto& f : fetches) {
        if (!f.valid)
            continue;
        variance += (Vec3(f.value[0], f.value[1], f.value[2]) - mean).squaredNorm();
    }
    variance /= 3.0 * n_valid;  // mean over channels, population variance

    out.sigma = params_.sigma_scale * std::exp(-variance / params_.tau);
    auto fused = fuse(fetches, params_.fusion, params_.fusion_tau, dir);
    if (fused)
        out.color = Vec3(fused->value[0], fused->value[1], fused->value[2]);
    return out;
}

namespace {

// Composite midpoint integral of sigma over [a, b].
double integrate_sigma(const AnalyticField& field, const Ray& ray, double a,
                       double b, int steps) {
    double h = (b - a) / steps;
    double sum = 0.0;
    for (int i = 0; i < steps; ++i)
        sum += field.sigma_at(ray.point_at(a + (i + 0.5) * h));
    return sum * h;
}

}  // namespace

double ground_truth_depth(const AnalyticField& field, const Ray& ray,
                          const GroundTruthParams& params) {
    ray.validate();
    const double target = std::log(2.0);  // optical depth at T = 0.5
    const int n = std::max(params.steps, 1);
    const double h = (ray.t_far - ray.t_near) / n;

    double accumulated = 0.0;
    for (int i = 0; i < n; ++i) {
        double t0 = ray.t_near + i * h;
        double t1 = t0 + h;
        double step = field.sigma_at(ray.point_at(0.5 * (t0 + t1))) * h;
        if (accumulated + step >= target) {
            // Re-integrate this step finely; the single midpoint estimate may
            // put the crossing in the wrong step for hard-edged primitives.
            double fine = integrate_sigma(field, ray, t0, t1, params.refine_substeps);
            if (accumulated + fine < target) {
                accumulated += fine;
                continue;
            }
            double lo = t0, hi = t1;
            while (hi - lo > params.tol) {
                double mid = 0.5 * (lo + hi);
                double q = accumulated +
                           integrate_sigma(field, ray, t0, mid, params.refine_substeps);
                (q < target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        accumulated += step;
    }
    return kBackgroundDepth;
}

}  // namespace vren

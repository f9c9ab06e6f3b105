#include "vren/ray_samples.hpp"

#include <cmath>
#include <stdexcept>

#include "vren/image.hpp"

namespace vren {

void compute_deltas(RaySamples& samples) {
    size_t n = samples.t.size();
    samples.delta.resize(n);
    double prev = samples.interval_lo;
    for (size_t j = 0; j < n; ++j) {
        samples.delta[j] = samples.t[j] - prev;
        prev = samples.t[j];
    }
}

void compute_transmittances(RaySamples& samples) {
    size_t n = samples.t.size();
    if (samples.delta.size() != n || samples.sigma.size() != n)
        throw std::invalid_argument("compute_transmittances: deltas/sigmas not set");
    samples.transmittance.resize(n);
    samples.weight.resize(n);
    double optical_depth = 0.0;
    for (size_t j = 0; j < n; ++j) {
        double T = std::exp(-optical_depth);
        double alpha = 1.0 - std::exp(-samples.sigma[j] * samples.delta[j]);
        samples.transmittance[j] = T;
        samples.weight[j] = T * alpha;
        optical_depth += samples.sigma[j] * samples.delta[j];
    }
}

Vec3 composite_color(const RaySamples& samples, const Vec3& background) {
    Vec3 acc = Vec3::Zero();
    double total_weight = 0.0;
    for (size_t j = 0; j < samples.size(); ++j) {
        acc += samples.weight[j] * samples.color[j];
        total_weight += samples.weight[j];
    }
    return acc + (1.0 - total_weight) * background;
}

double fine_depth(const RaySamples& samples, double eps_bg) {
    double total_weight = 0.0;
    double weighted_t = 0.0;
    for (size_t j = 0; j < samples.size(); ++j) {
        total_weight += samples.weight[j];
        weighted_t += samples.weight[j] * samples.t[j];
    }
    if (total_weight < eps_bg)
        return kBackgroundDepth;
    return weighted_t / total_weight;
}

}  // namespace vren

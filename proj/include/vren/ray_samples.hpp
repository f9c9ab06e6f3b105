#pragma once

#include <vector>

#include "vren/geometry.hpp"

namespace vren {

// Ordered samples along one ray. Deltas measure to the previous sample,
// with delta[0] taken from interval_lo; the final sample has no trailing
// slab, so anything beyond it composites to background.
struct RaySamples {
    double interval_lo = 0.0;
    std::vector<double> t;       // strictly increasing
    std::vector<double> sigma;   // >= 0
    std::vector<Vec3> color;
    std::vector<double> delta;
    std::vector<double> transmittance;  // T_j = exp(-sum_{k<j} sigma_k delta_k)
    std::vector<double> weight;         // w_j = T_j (1 - exp(-sigma_j delta_j))

    size_t size() const { return t.size(); }
};

// Fills delta from t and interval_lo.
void compute_deltas(RaySamples& samples);

// Fills transmittance and weight; requires sorted t and deltas set.
void compute_transmittances(RaySamples& samples);

// Accumulated radiance plus background weighted by residual transparency.
Vec3 composite_color(const RaySamples& samples, const Vec3& background);

// Weight-averaged sample depth; kBackgroundDepth when the accumulated
// weight stays below eps_bg.
double fine_depth(const RaySamples& samples, double eps_bg);

}  // namespace vren

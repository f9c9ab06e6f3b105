#pragma once

#include <cstdint>
#include <vector>

#include "vren/fields.hpp"
#include "vren/geometry.hpp"
#include "vren/ray_samples.hpp"

namespace vren {

struct SamplingInterval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
};

// Local linear model of the transmittance profile, fit on two points.
struct TransmittanceModel {
    double slope = 0.0;
    double intercept = 1.0;
    double t_a = 0.0, t_b = 0.0;  // support

    static TransmittanceModel fit(double t_a, double trans_a, double t_b,
                                  double trans_b);
    double eval(double t) const { return slope * t + intercept; }
};

struct SamplerBudget {
    int n_coarse = 0;   // uniform jittered pre-samples
    int n_dynamic = 0;  // predict-then-refine samples (includes the initial 3)
    std::uint64_t seed = 0;

    void validate() const;
};

// One jittered sample per equal bin of [lo, hi], strictly increasing.
// The jitters vector supplies one value in [0,1) per bin.
std::vector<double> stratified_positions(double lo, double hi, int n,
                                         const std::vector<double>& jitters);

// Seeded stratified sampling over the ray bounds.
std::vector<double> stratified_samples(const Ray& ray, int n, std::uint64_t seed);

// Interval [d_c - delta_d, d_c + delta_d] clamped to the ray bounds. The
// background sentinel (d_c < 0) or an empty clamped interval falls back to
// the full [t_near, t_far]. Throws std::invalid_argument when delta_d <= 0.
SamplingInterval geometry_interval(double coarse_depth, double delta_d,
                                   double t_near, double t_far);

// Position where the linear model predicts T = 0.5, clamped to the
// interval; a flat model (|slope| < 1e-9) yields the interval midpoint.
double solve_t_half(const TransmittanceModel& model, const SamplingInterval& interval);

// Coarse uniform samples followed by predict-then-refine placement toward
// the T = 0.5 crossing. Returns samples sorted ascending with sigma and
// color evaluated; the field is queried exactly once per returned sample.
// dynamic_positions, when non-null, receives the dynamic-phase t values.
RaySamples dynamic_samples(const Field& field, const Ray& ray,
                           const SamplingInterval& interval,
                           const SamplerBudget& budget,
                           std::vector<double>* dynamic_positions = nullptr);

}  // namespace vren

#pragma once

#include <string>
#include <vector>

#include "vren/geometry.hpp"
#include "vren/image.hpp"

namespace vren {

struct CostVolumeParams {
    double ceiling = 1.0;     // cost for pixels seen by < 2 views
    bool box_filter = false;  // optional 3x3 smoothing per plane
};

// Per-pixel, per-depth-hypothesis photometric disagreement among reference
// views warped into the target view.
struct CostVolume {
    int width = 0, height = 0;
    std::vector<double> hypotheses;  // strictly increasing depths
    std::vector<float> cost;         // [k][y][x], finite and >= 0
    double ceiling = 1.0;

    double at(int x, int y, int k) const {
        return cost[(static_cast<size_t>(k) * height + y) * width + x];
    }
    float& at(int x, int y, int k) {
        return cost[(static_cast<size_t>(k) * height + y) * width + x];
    }
};

// Per-pixel distribution over the depth hypotheses.
struct DepthProbabilities {
    int width = 0, height = 0;
    int n_hypotheses = 0;
    std::vector<double> p;  // [y][x][k], each pixel sums to 1

    double at(int x, int y, int k) const {
        return p[(static_cast<size_t>(y) * width + x) * n_hypotheses + k];
    }
};

// D depth hypotheses uniform in inverse depth over [near, far].
std::vector<double> inverse_depth_hypotheses(double near, double far, int count);

// Warps every reference into the target view per hypothesis plane and
// scores the across-view variance of the fetched colors. Views whose fetch
// falls outside their image are excluded; pixels with < 2 valid views get
// the ceiling cost. Throws std::invalid_argument for < 2 reference views or
// < 2 hypotheses.
CostVolume build_cost_volume(const Camera& target,
                             const std::vector<PosedImage>& references,
                             const std::vector<double>& hypotheses,
                             const CostVolumeParams& params = {});

// Softmax over -cost/tau per pixel. Throws when tau <= 0.
DepthProbabilities depth_probabilities(const CostVolume& volume, double tau);

// Probability-weighted mean of the hypothesis depths.
DepthMap regress_depth(const CostVolume& volume, double tau);

// Per-pixel affine map scale * d + offset; the background sentinel is
// preserved. Throws when scale <= 0.
DepthMap rescale_depth(const DepthMap& map, double scale, double offset);

// Writes the raw cost planes as little-endian float32 for debugging.
void dump_cost_volume(const std::string& path, const CostVolume& volume);

}  // namespace vren

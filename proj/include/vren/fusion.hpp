#pragma once

#include <optional>
#include <vector>

#include "vren/geometry.hpp"
#include "vren/image.hpp"

namespace vren {

enum class FusionScheme { kUniform, kVarianceSoftmax, kAngleSoftmax };

enum class FetchDescriptor { kColor, kPatch3x3 };

struct ViewFetch {
    int view_index = -1;
    std::vector<double> value;  // 3 (color) or 27 (3x3 patch) entries
    bool valid = false;         // in view, in front, non-degenerate direction
    Vec3 direction = Vec3::UnitZ();  // unit vector, view center -> point
};

struct FusionWeights {
    std::vector<double> weights;  // per view; invalid views carry 0
};

struct FusionResult {
    std::vector<double> value;
    FusionWeights weights;
};

// Projects x into every view and fetches a bilinear descriptor. Fetches are
// invalid when the point is behind the camera, outside the bilinear support,
// or coincides with a view's camera center.
std::vector<ViewFetch> fetch_views(const Vec3& x,
                                   const std::vector<PosedImage>& views,
                                   FetchDescriptor descriptor = FetchDescriptor::kColor);

// Weighted fusion over the valid fetches. target_direction is only used by
// the angle scheme (unit vector from the target camera toward the point).
// Returns nullopt when no fetch is valid; callers treat the point as free
// space. Throws std::invalid_argument for tau <= 0 on the softmax schemes.
std::optional<FusionResult> fuse(const std::vector<ViewFetch>& fetches,
                                 FusionScheme scheme, double tau,
                                 const Vec3& target_direction = Vec3::UnitZ());

}  // namespace vren

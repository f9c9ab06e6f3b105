#include "vren/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vren {

std::vector<ViewFetch> fetch_views(const Vec3& x,
                                   const std::vector<PosedImage>& views,
                                   FetchDescriptor descriptor) {
    if (views.empty())
        throw std::invalid_argument("fetch_views: at least one view required");

    std::vector<ViewFetch> fetches(views.size());
    for (size_t i = 0; i < views.size(); ++i) {
        ViewFetch& f = fetches[i];
        f.view_index = static_cast<int>(i);

        Vec3 center = views[i].camera.pose.camera_center();
        Vec3 offset = x - center;
        double dist = offset.norm();
        if (dist < 1e-12)
            continue;  // point at the camera center, direction undefined
        f.direction = offset / dist;

        auto proj = project(views[i].camera.intrinsics, views[i].camera.pose, x);
        if (!proj)
            continue;

        const Image& img = views[i].image;
        if (descriptor == FetchDescriptor::kColor) {
            auto c = img.bilinear(proj->pixel.x(), proj->pixel.y());
            if (!c)
                continue;
            f.value = {(*c)[0], (*c)[1], (*c)[2]};
        } else {
            f.value.reserve(27);
            bool ok = true;
            for (int dy = -1; dy <= 1 && ok; ++dy) {
                for (int dx = -1; dx <= 1 && ok; ++dx) {
                    auto c = img.bilinear(proj->pixel.x() + dx, proj->pixel.y() + dy);
                    if (!c) {
                        ok = false;
                        break;
                    }
                    f.value.push_back((*c)[0]);
                    f.value.push_back((*c)[1]);
                    f.value.push_back((*c)[2]);
                }
            }
            if (!ok) {
                f.value.clear();
                continue;
            }
        }
        f.valid = true;
    }
    return fetches;
}

namespace {

// Component-wise median across the valid fetches.
std::vector<double> component_median(const std::vector<const ViewFetch*>& valid) {
    size_t dim = valid.front()->value.size();
    std::vector<double> median(dim);
    std::vector<double> column(valid.size());
    for (size_t d = 0; d < dim; ++d) {
        for (size_t i = 0; i < valid.size(); ++i)
            column[i] = valid[i]->value[d];
        std::sort(column.begin(), column.end());
        size_t n = column.size();
        median[d] = (n % 2 == 1) ? column[n / 2]
                                 : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return median;
}

}  // namespace

std::optional<FusionResult> fuse(const std::vector<ViewFetch>& fetches,
                                 FusionScheme scheme, double tau,
                                 const Vec3& target_direction) {
    std::vector<const ViewFetch*> valid;
    valid.reserve(fetches.size());
    for (const auto& f : fetches)
        if (f.valid)
            valid.push_back(&f);
    if (valid.empty())
        return std::nullopt;
    if (scheme != FusionScheme::kUniform && !(tau > 0.0))
        throw std::invalid_argument("fuse: tau must be positive");

    size_t dim = valid.front()->value.size();
    for (const auto* f : valid)
        if (f->value.size() != dim)
            throw std::invalid_argument("fuse: mixed descriptor sizes");

    std::vector<double> score(valid.size(), 0.0);
    switch (scheme) {
        case FusionScheme::kUniform:
            break;
        case FusionScheme::kVarianceSoftmax: {
            std::vector<double> median = component_median(valid);
            for (size_t i = 0; i < valid.size(); ++i) {
                double dist2 = 0.0;
                for (size_t d = 0; d < dim; ++d) {
                    double diff = valid[i]->value[d] - median[d];
                    dist2 += diff * diff;
                }
                score[i] = -dist2 / tau;
            }
            break;
        }
        case FusionScheme::kAngleSoftmax: {
            Vec3 target = target_direction.normalized();
            for (size_t i = 0; i < valid.size(); ++i)
                score[i] = valid[i]->direction.dot(target) / tau;
            break;
        }
    }

    double max_score = *std::max_element(score.begin(), score.end());
    double total = 0.0;
    std::vector<double> w(valid.size());
    for (size_t i = 0; i < valid.size(); ++i) {
        w[i] = std::exp(score[i] - max_score);
        total += w[i];
    }

    FusionResult result;
    result.value.assign(dim, 0.0);
    result.weights.weights.assign(fetches.size(), 0.0);
    for (size_t i = 0; i < valid.size(); ++i) {
        double wi = w[i] / total;
        result.weights.weights[static_cast<size_t>(valid[i]->view_index)] = wi;
        for (size_t d = 0; d < dim; ++d)
            result.value[d] += wi * valid[i]->value[d];
    }
    return result;
}

}  // namespace vren

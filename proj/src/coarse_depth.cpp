#include "vren/coarse_depth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vren {

std::vector<double> inverse_depth_hypotheses(double near, double far, int count) {
    if (!(near > 0.0) || !(far > near) || count < 2)
        throw std::invalid_argument("hypotheses: need 0 < near < far and count >= 2");
    std::vector<double> out(count);
    double inv_near = 1.0 / near;
    double inv_far = 1.0 / far;
    for (int k = 0; k < count; ++k) {
        double a = static_cast<double>(k) / (count - 1);
        out[k] = 1.0 / (inv_near + a * (inv_far - inv_near));
    }
    std::reverse(out.begin(), out.end());  // ascending depth
    return out;
}

CostVolume build_cost_volume(const Camera& target,
                             const std::vector<PosedImage>& references,
                             const std::vector<double>& hypotheses,
                             const CostVolumeParams& params) {
    if (references.size() < 2)
        throw std::invalid_argument("cost volume: need >= 2 reference views");
    if (hypotheses.size() < 2)
        throw std::invalid_argument("cost volume: need >= 2 depth hypotheses");
    for (size_t k = 1; k < hypotheses.size(); ++k)
        if (!(hypotheses[k] > hypotheses[k - 1]))
            throw std::invalid_argument("cost volume: hypotheses must be increasing");

    const int w = target.intrinsics.width;
    const int h = target.intrinsics.height;
    const int n_hyp = static_cast<int>(hypotheses.size());

    CostVolume vol;
    vol.width = w;
    vol.height = h;
    vol.hypotheses = hypotheses;
    vol.ceiling = params.ceiling;
    vol.cost.assign(static_cast<size_t>(n_hyp) * h * w, 0.0f);

    std::vector<Vec3> fetched(references.size());
    for (int k = 0; k < n_hyp; ++k) {
        std::vector<Mat3> homographies(references.size());
        for (size_t r = 0; r < references.size(); ++r)
            homographies[r] =
                plane_homography(references[r].camera, target, hypotheses[k]);

        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                Vec2 px(x + 0.5, y + 0.5);
                int n_valid = 0;
                Vec3 mean = Vec3::Zero();
                for (size_t r = 0; r < references.size(); ++r) {
                    auto mapped = apply_homography(homographies[r], px);
                    if (!mapped)
                        continue;
                    auto c = references[r].image.bilinear(mapped->x(), mapped->y());
                    if (!c)
                        continue;
                    fetched[n_valid++] = *c;
                    mean += *c;
                }
                double cost;
                if (n_valid < 2) {
                    cost = params.ceiling;
                } else {
                    mean /= n_valid;
                    double var = 0.0;
                    for (int r = 0; r < n_valid; ++r)
                        var += (fetched[r] - mean).squaredNorm();
                    cost = var / (3.0 * n_valid);  // channel-mean variance
                }
                vol.at(x, y, k) = static_cast<float>(cost);
            }
        }
    }

    if (params.box_filter) {
        std::vector<float> plane(static_cast<size_t>(w) * h);
        for (int k = 0; k < n_hyp; ++k) {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    float sum = 0.0f;
                    int cnt = 0;
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            int xx = x + dx, yy = y + dy;
                            if (xx < 0 || yy < 0 || xx >= w || yy >= h)
                                continue;
                            sum += vol.cost[(static_cast<size_t>(k) * h + yy) * w + xx];
                            ++cnt;
                        }
                    plane[static_cast<size_t>(y) * w + x] = sum / cnt;
                }
            std::copy(plane.begin(), plane.end(),
                      vol.cost.begin() + static_cast<size_t>(k) * h * w);
        }
    }

    return vol;
}

DepthProbabilities depth_probabilities(const CostVolume& volume, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("depth_probabilities: tau must be positive");

    DepthProbabilities probs;
    probs.width = volume.width;
    probs.height = volume.height;
    probs.n_hypotheses = static_cast<int>(volume.hypotheses.size());
    probs.p.assign(static_cast<size_t>(volume.width) * volume.height *
                       probs.n_hypotheses,
                   0.0);

    for (int y = 0; y < volume.height; ++y) {
        for (int x = 0; x < volume.width; ++x) {
            double min_cost = volume.at(x, y, 0);
            for (int k = 1; k < probs.n_hypotheses; ++k)
                min_cost = std::min(min_cost, volume.at(x, y, k));
            double total = 0.0;
            size_t base = (static_cast<size_t>(y) * volume.width + x) *
                          probs.n_hypotheses;
            for (int k = 0; k < probs.n_hypotheses; ++k) {
                double p = std::exp(-(volume.at(x, y, k) - min_cost) / tau);
                probs.p[base + k] = p;
                total += p;
            }
            for (int k = 0; k < probs.n_hypotheses; ++k)
                probs.p[base + k] /= total;
        }
    }
    return probs;
}

DepthMap regress_depth(const CostVolume& volume, double tau) {
    DepthProbabilities probs = depth_probabilities(volume, tau);
    DepthMap map(volume.width, volume.height);
    for (int y = 0; y < volume.height; ++y) {
        for (int x = 0; x < volume.width; ++x) {
            double d = 0.0;
            for (int k = 0; k < probs.n_hypotheses; ++k)
                d += probs.at(x, y, k) * volume.hypotheses[k];
            map.at(x, y) = d;
        }
    }
    return map;
}

DepthMap rescale_depth(const DepthMap& map, double scale, double offset) {
    if (!(scale > 0.0))
        throw std::invalid_argument("rescale_depth: scale must be positive");
    DepthMap out = map;
    for (auto& d : out.depth)
        if (!is_background(d))
            d = scale * d + offset;
    return out;
}

void dump_cost_volume(const std::string& path, const CostVolume& volume) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(volume.cost.data()),
              static_cast<std::streamsize>(volume.cost.size() * sizeof(float)));
    std::ofstream hdr(path + ".hdr");
    hdr << volume.width << " " << volume.height << " " << volume.hypotheses.size()
        << "\n";
}

}  // namespace vren

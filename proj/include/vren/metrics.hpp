#pragma once

#include <stdexcept>

#include "vren/image.hpp"

namespace vren {

// Thrown when a metric has no valid pixels to evaluate.
class NoDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPsnrCap = 99.0;  // reported for identical images

struct ImageMetrics {
    double mse = 0.0;
    double psnr = kPsnrCap;  // dB, 10*log10(1/mse) for unit dynamic range
    double ssim = 1.0;
    double msc = 0.0;        // filled by callers that evaluate msc()
};

struct DepthMetrics {
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;  // thresholds 1.25^k
    long valid_pixels = 0;
};

// MSE over pixels and channels, PSNR, and SSIM (11x11 Gaussian window,
// sigma 1.5, K1=0.01, K2=0.03, unit dynamic range, channel-averaged).
// Throws std::invalid_argument on dimension mismatch.
ImageMetrics image_metrics(const Image& pred, const Image& gt);

// Evaluated over pixels where both maps are non-background and gt > 0.
// delta_k uses the strict inequality max(p/g, g/p) < 1.25^k. Throws
// NoDataError when no pixel qualifies.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt);

struct MscParams {
    int levels = 3;
    bool gradients = true;  // augment each level with x/y gradient channels
};

// Multi-level consistency: sum over pyramid levels of the mean squared
// feature difference. Level 1 is the image itself; each further level is a
// Gaussian-blurred 2x downsampling. Dimensions must divide 2^(levels-1).
double msc(const Image& pred, const Image& gt, const MscParams& params = {});

// alpha * mse + beta * msc; coefficients must be >= 0.
double composite_score(double mse, double msc_value, double alpha, double beta);

}  // namespace vren

#include "vren/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace vren {

namespace {

double mean_squared_diff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        sum += (a[i] - b[i]).squaredNorm();
    return sum / (3.0 * a.size());
}

constexpr int kSsimWindow = 11;

std::array<double, kSsimWindow> ssim_kernel() {
    std::array<double, kSsimWindow> k{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        double d = i - (kSsimWindow - 1) / 2.0;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (auto& v : k)
        v /= sum;
    return k;
}

// Valid-region separable convolution with the SSIM kernel.
std::vector<double> conv_valid(const std::vector<double>& img, int w, int h,
                               int& out_w, int& out_h) {
    static const std::array<double, kSsimWindow> kernel = ssim_kernel();
    out_w = w - kSsimWindow + 1;
    out_h = h - kSsimWindow + 1;
    std::vector<double> rows(static_cast<size_t>(out_w) * h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                acc += kernel[i] * img[static_cast<size_t>(y) * w + x + i];
            rows[static_cast<size_t>(y) * out_w + x] = acc;
        }
    std::vector<double> out(static_cast<size_t>(out_w) * out_h, 0.0);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                acc += kernel[i] * rows[static_cast<size_t>(y + i) * out_w + x];
            out[static_cast<size_t>(y) * out_w + x] = acc;
        }
    return out;
}

double ssim_channel(const std::vector<double>& a, const std::vector<double>& b,
                    int w, int h) {
    const double c1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
    const double c2 = 0.03 * 0.03;

    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }

    int ow = 0, oh = 0;
    std::vector<double> mu_a = conv_valid(a, w, h, ow, oh);
    std::vector<double> mu_b = conv_valid(b, w, h, ow, oh);
    std::vector<double> s_aa = conv_valid(aa, w, h, ow, oh);
    std::vector<double> s_bb = conv_valid(bb, w, h, ow, oh);
    std::vector<double> s_ab = conv_valid(ab, w, h, ow, oh);

    double total = 0.0;
    for (size_t i = 0; i < mu_a.size(); ++i) {
        double va = s_aa[i] - mu_a[i] * mu_a[i];
        double vb = s_bb[i] - mu_b[i] * mu_b[i];
        double cov = s_ab[i] - mu_a[i] * mu_b[i];
        double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
        double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
        total += num / den;
    }
    return total / mu_a.size();
}

}  // namespace

ImageMetrics image_metrics(const Image& pred, const Image& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw std::invalid_argument("image_metrics: dimension mismatch");
    if (pred.width() < kSsimWindow || pred.height() < kSsimWindow)
        throw std::invalid_argument("image_metrics: image smaller than SSIM window");

    ImageMetrics m;
    m.mse = mean_squared_diff(pred.pixels(), gt.pixels());
    m.psnr = (m.mse > 0.0) ? 10.0 * std::log10(1.0 / m.mse) : kPsnrCap;

    const size_t n = pred.pixels().size();
    std::vector<double> a(n), b(n);
    double ssim_sum = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        for (size_t i = 0; i < n; ++i) {
            a[i] = pred.pixels()[i][ch];
            b[i] = gt.pixels()[i][ch];
        }
        ssim_sum += ssim_channel(a, b, pred.width(), pred.height());
    }
    m.ssim = ssim_sum / 3.0;
    return m;
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("depth_metrics: dimension mismatch");

    DepthMetrics m;
    double sum_abs_rel = 0.0, sum_sq_rel = 0.0, sum_sq = 0.0;
    long d1 = 0, d2 = 0, d3 = 0;
    for (size_t i = 0; i < pred.depth.size(); ++i) {
        double p = pred.depth[i];
        double g = gt.depth[i];
        if (is_background(p) || is_background(g) || !(g > 0.0))
            continue;
        ++m.valid_pixels;
        double diff = p - g;
        sum_abs_rel += std::abs(diff) / g;
        sum_sq_rel += diff * diff / g;
        sum_sq += diff * diff;
        double ratio = std::max(p / g, g / p);
        if (ratio < 1.25)
            ++d1;
        if (ratio < 1.25 * 1.25)
            ++d2;
        if (ratio < 1.25 * 1.25 * 1.25)
            ++d3;
    }
    if (m.valid_pixels == 0)
        throw NoDataError("depth_metrics: no valid pixels");

    double n = static_cast<double>(m.valid_pixels);
    m.abs_rel = sum_abs_rel / n;
    m.sq_rel = sum_sq_rel / n;
    m.rmse = std::sqrt(sum_sq / n);
    m.delta1 = d1 / n;
    m.delta2 = d2 / n;
    m.delta3 = d3 / n;
    return m;
}

namespace {

// 5-tap binomial blur, reflected borders, then decimation by 2.
Image downsample2(const Image& img) {
    static const double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    int w = img.width(), h = img.height();
    auto reflect = [](int i, int n) {
        if (i < 0)
            return -i;
        if (i >= n)
            return 2 * n - 2 - i;
        return i;
    };

    Image rows(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Vec3 acc = Vec3::Zero();
            for (int i = -2; i <= 2; ++i)
                acc += k[i + 2] * img.at(reflect(x + i, w), y);
            rows.at(x, y) = acc;
        }
    Image blurred(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Vec3 acc = Vec3::Zero();
            for (int i = -2; i <= 2; ++i)
                acc += k[i + 2] * rows.at(x, reflect(y + i, h));
            blurred.at(x, y) = acc;
        }

    Image out(w / 2, h / 2);
    for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w / 2; ++x)
            out.at(x, y) = blurred.at(2 * x, 2 * y);
    return out;
}

// Mean squared difference over color channels plus, optionally, central
// difference x/y gradient channels.
double level_feature_diff(const Image& a, const Image& b, bool gradients) {
    double color_term = mean_squared_diff(a.pixels(), b.pixels());
    if (!gradients)
        return color_term;

    int w = a.width(), h = a.height();
    auto clampi = [](int i, int n) { return std::clamp(i, 0, n - 1); };
    double grad_sum = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Vec3 gx_a = 0.5 * (a.at(clampi(x + 1, w), y) - a.at(clampi(x - 1, w), y));
            Vec3 gx_b = 0.5 * (b.at(clampi(x + 1, w), y) - b.at(clampi(x - 1, w), y));
            Vec3 gy_a = 0.5 * (a.at(x, clampi(y + 1, h)) - a.at(x, clampi(y - 1, h)));
            Vec3 gy_b = 0.5 * (b.at(x, clampi(y + 1, h)) - b.at(x, clampi(y - 1, h)));
            grad_sum += (gx_a - gx_b).squaredNorm() + (gy_a - gy_b).squaredNorm();
        }
    double grad_term = grad_sum / (6.0 * w * h);
    // 9 feature channels per pixel: 3 color + 6 gradient.
    return (3.0 * color_term + 6.0 * grad_term) / 9.0;
}

}  // namespace

double msc(const Image& pred, const Image& gt, const MscParams& params) {
    if (params.levels < 1)
        throw std::invalid_argument("msc: levels must be >= 1");
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw std::invalid_argument("msc: dimension mismatch");
    int divisor = 1 << (params.levels - 1);
    if (pred.width() % divisor != 0 || pred.height() % divisor != 0)
        throw std::invalid_argument("msc: dimensions must divide 2^(levels-1)");

    double total = 0.0;
    Image a = pred, b = gt;
    for (int level = 1; level <= params.levels; ++level) {
        total += level_feature_diff(a, b, params.gradients);
        if (level < params.levels) {
            a = downsample2(a);
            b = downsample2(b);
        }
    }
    return total;
}

double composite_score(double mse, double msc_value, double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0)
        throw std::invalid_argument("composite_score: coefficients must be >= 0");
    return alpha * mse + beta * msc_value;
}

}  // namespace vren

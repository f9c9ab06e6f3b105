#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vren/geometry.hpp"

namespace vren {

// Depth value marking rays whose accumulated opacity never reached the
// background threshold. Valid depths are strictly positive.
inline constexpr double kBackgroundDepth = -1.0;

inline bool is_background(double depth) { return depth < 0.0; }

// Row-major RGB image with channels in [0, 1].
class Image {
public:
    Image() = default;
    Image(int width, int height, const Vec3& fill = Vec3::Zero());

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    Vec3& at(int x, int y) { return pixels_[static_cast<size_t>(y) * width_ + x]; }
    const Vec3& at(int x, int y) const {
        return pixels_[static_cast<size_t>(y) * width_ + x];
    }

    const std::vector<Vec3>& pixels() const { return pixels_; }
    std::vector<Vec3>& pixels() { return pixels_; }

    // Bilinear fetch at a continuous position (pixel centers at i+0.5).
    // Returns nullopt when the four taps are not fully inside the image;
    // border samples are never clamped.
    std::optional<Vec3> bilinear(double u, double v) const;

private:
    int width_ = 0, height_ = 0;
    std::vector<Vec3> pixels_;
};

struct RenderedImage {
    Image color;
    std::vector<double> opacity;  // per-pixel accumulated weight, in [0, 1]

    int width() const { return color.width(); }
    int height() const { return color.height(); }
};

struct DepthMap {
    int width = 0, height = 0;
    std::vector<double> depth;  // kBackgroundDepth marks background

    DepthMap() = default;
    DepthMap(int w, int h, double fill = kBackgroundDepth)
        : width(w), height(h), depth(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return depth[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const {
        return depth[static_cast<size_t>(y) * width + x];
    }
};

// An image with the camera that produced it.
struct PosedImage {
    Camera camera;
    Image image;
};

// Binary PPM (P6, 8 bit). Channels are clamped to [0,1] and rounded.
void write_ppm(const std::string& path, const Image& image);

// Raw little-endian float32 depth plus a one-line text sidecar at
// path + ".hdr" holding "width height sentinel".
void write_depth_raw(const std::string& path, const DepthMap& map);
DepthMap read_depth_raw(const std::string& path);

}  // namespace vren

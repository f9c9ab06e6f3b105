#include "vren/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vren {

Image::Image(int width, int height, const Vec3& fill)
    : width_(width), height_(height),
      pixels_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("image: size must be positive");
}

std::optional<Vec3> Image::bilinear(double u, double v) const {
    double x = u - 0.5;
    double y = v - 0.5;
    if (x < 0.0 || y < 0.0 || x > width_ - 1 || y > height_ - 1)
        return std::nullopt;
    int x0 = std::min(static_cast<int>(x), width_ - 2);
    int y0 = std::min(static_cast<int>(y), height_ - 2);
    if (width_ < 2 || height_ < 2) {
        // Degenerate 1-wide/1-tall images still support exact center hits.
        x0 = 0;
        y0 = 0;
    }
    double fx = x - x0;
    double fy = y - y0;
    const Vec3& c00 = at(x0, y0);
    const Vec3& c10 = at(std::min(x0 + 1, width_ - 1), y0);
    const Vec3& c01 = at(x0, std::min(y0 + 1, height_ - 1));
    const Vec3& c11 = at(std::min(x0 + 1, width_ - 1), std::min(y0 + 1, height_ - 1));
    return (1.0 - fy) * ((1.0 - fx) * c00 + fx * c10) +
           fy * ((1.0 - fx) * c01 + fx * c11);
}

void write_ppm(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(image.width()) * 3);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const Vec3& c = image.at(x, y);
            for (int ch = 0; ch < 3; ++ch) {
                double v = std::clamp(c[ch], 0.0, 1.0);
                row[static_cast<size_t>(x) * 3 + ch] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

void write_depth_raw(const std::string& path, const DepthMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    std::vector<float> buf(map.depth.size());
    for (size_t i = 0; i < map.depth.size(); ++i)
        buf[i] = static_cast<float>(map.depth[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("write failed: " + path);

    std::ofstream hdr(path + ".hdr");
    if (!hdr)
        throw std::runtime_error("cannot open for writing: " + path + ".hdr");
    hdr << map.width << " " << map.height << " " << kBackgroundDepth << "\n";
}

DepthMap read_depth_raw(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr)
        throw std::runtime_error("cannot open: " + path + ".hdr");
    int w = 0, h = 0;
    double sentinel = kBackgroundDepth;
    hdr >> w >> h >> sentinel;
    if (w <= 0 || h <= 0)
        throw std::runtime_error("bad depth header: " + path + ".hdr");

    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    std::vector<float> buf(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
        throw std::runtime_error("truncated depth file: " + path);

    DepthMap map(w, h);
    for (size_t i = 0; i < buf.size(); ++i) {
        double d = buf[i];
        map.depth[i] = (d == sentinel || d < 0.0) ? kBackgroundDepth : d;
    }
    return map;
}

}  // namespace vren

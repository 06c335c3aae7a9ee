// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/envmap.h"

#include <cmath>
#include <stdexcept>

namespace eyevol {

EnvMap::EnvMap(Image3f img) : radiance(std::move(img)) {
    for (size_t i = 0; i < radiance.data.size(); i++) {
        float v = radiance.data[i];
        if (!std::isfinite(v))
            throw std::runtime_error("envmap: non-finite radiance at texel " +
                                     std::to_string(i / 3));
        if (v < 0) throw std::runtime_error("envmap: negative radiance at texel " +
                                            std::to_string(i / 3));
    }
}

EnvMap EnvMap::constant(int w, int h, const Rgb& value) {
    Image3f img(w, h);
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++) img.set(x, y, value);
    return EnvMap(std::move(img));
}

Vec3 spherical_to_dir(double theta, double phi) {
    double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

void dir_to_spherical(const Vec3& dir, double& theta, double& phi) {
    theta = std::acos(clamp(dir.z, -1.0, 1.0));
    phi = std::atan2(dir.y, dir.x);  // [-pi, pi]
}

Vec3 EnvMap::texel_direction(int ix, int iy) const {
    double theta = (iy + 0.5) / height() * M_PI;
    double phi = -M_PI + (ix + 0.5) / width() * 2.0 * M_PI;
    return spherical_to_dir(theta, phi);
}

double EnvMap::texel_solid_angle(int iy) const {
    double theta = (iy + 0.5) / height() * M_PI;
    return std::sin(theta) * (M_PI / height()) * (2.0 * M_PI / width());
}

Rgb EnvMap::texel(int ix, int iy) const {
    int w = width(), h = height();
    iy = int(clamp(double(iy), 0.0, double(h - 1)));
    ix = ((ix % w) + w) % w;
    return radiance.at(ix, iy);
}

Rgb EnvMap::sample(const Vec3& dir) const {
    double theta, phi;
    dir_to_spherical(normalize(dir), theta, phi);
    double u = (phi + M_PI) / (2.0 * M_PI) * width() - 0.5;
    double v = theta / M_PI * height() - 0.5;
    int x0 = int(std::floor(u)), y0 = int(std::floor(v));
    double fx = u - x0, fy = v - y0;
    Rgb c00 = texel(x0, y0), c10 = texel(x0 + 1, y0);
    Rgb c01 = texel(x0, y0 + 1), c11 = texel(x0 + 1, y0 + 1);
    return c00 * ((1 - fx) * (1 - fy)) + c10 * (fx * (1 - fy)) + c01 * ((1 - fx) * fy) +
           c11 * (fx * fy);
}

EnvMap load_envmap(const std::string& path) {
    auto ends_with = [&path](const char* suffix) {
        std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".pfm")) return EnvMap(read_pfm(path));
    if (ends_with(".ppm")) return EnvMap(read_ppm(path));
    throw std::runtime_error("envmap: unsupported format (want .pfm or .ppm): " + path);
}

}  // namespace eyevol

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_ENVMAP_H
#define EYEVOL_ENVMAP_H

#include <string>

#include "eyevol/image.h"
#include "eyevol/vecmath.h"

namespace eyevol {

// Lat-long HDR radiance map.
//
// Convention: phi in [-pi, pi) maps left-to-right across the width,
// colatitude theta in [0, pi] maps top-to-bottom (row 0 is theta = 0 = +z).
// Directions are (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)).
struct EnvMap {
    Image3f radiance;

    EnvMap() = default;
    explicit EnvMap(Image3f img);

    int width() const { return radiance.width; }
    int height() const { return radiance.height; }

    static EnvMap constant(int w, int h, const Rgb& value);

    // Unit direction of the texel center (ix, iy).
    Vec3 texel_direction(int ix, int iy) const;

    // Solid angle subtended by row iy's texels: sin(theta) * dtheta * dphi.
    double texel_solid_angle(int iy) const;

    // Bilinear lookup with longitude wraparound and latitude clamping.
    Rgb sample(const Vec3& dir) const;

    // Texel at (ix, iy) with longitude wrap / latitude clamp applied.
    Rgb texel(int ix, int iy) const;
};

EnvMap load_envmap(const std::string& path);  // .pfm (HDR) or .ppm (LDR, sRGB-decoded)

Vec3 spherical_to_dir(double theta, double phi);
void dir_to_spherical(const Vec3& dir, double& theta, double& phi);

}  // namespace eyevol

#endif

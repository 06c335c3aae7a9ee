// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_IMAGE_H
#define EYEVOL_IMAGE_H

#include <string>
#include <vector>

#include "eyevol/vecmath.h"

namespace eyevol {

// Linear-radiance RGB image, float32 storage, row 0 at the top.
struct Image3f {
    int width = 0, height = 0;
    std::vector<float> data;  // 3 * width * height, interleaved RGB

    Image3f() = default;
    Image3f(int w, int h) : width(w), height(h), data(size_t(3) * w * h, 0.f) {}

    Rgb at(int x, int y) const {
        const float* p = &data[3 * (size_t(y) * width + x)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, const Rgb& c) {
        float* p = &data[3 * (size_t(y) * width + x)];
        p[0] = float(c.r); p[1] = float(c.g); p[2] = float(c.b);
    }
};

// sRGB transfer with linear continuations outside [0, 1]: above 1 the curve
// continues with its slope at 1 (1.055/2.4), below 0 with the slope of the
// linear toe (12.92).
double srgb_encode(double x);
double srgb_decode(double y);

// PFM: color "PF", little-endian (negative scale), rows bottom-up.
void write_pfm(const std::string& path, const Image3f& img);
Image3f read_pfm(const std::string& path);

// Binary PPM (P6, maxval 255); values are sRGB-encoded on write and decoded
// on read.
void write_ppm(const std::string& path, const Image3f& img);
Image3f read_ppm(const std::string& path);

// Mean over pixels of the channel-summed squared difference.
double image_mse(const Image3f& a, const Image3f& b);

}  // namespace eyevol

#endif

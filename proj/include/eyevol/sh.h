// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_SH_H
#define EYEVOL_SH_H

#include <string>
#include <vector>

#include "eyevol/envmap.h"
#include "eyevol/vecmath.h"

namespace eyevol {

// Real spherical harmonics coefficients up to max_order, flat layout
// index(l, m) = l^2 + l + m, one plane of (max_order+1)^2 values per channel.
struct ShCoefficients {
    int max_order = 0;
    int channels = 1;  // 1 (transfer) or 3 (RGB environment)
    std::vector<double> values;

    ShCoefficients() : values(1, 0.0) {}
    ShCoefficients(int order, int nchannels);

    static int index(int l, int m) { return l * l + l + m; }
    int coeffs_per_channel() const { return (max_order + 1) * (max_order + 1); }

    double& at(int l, int m, int channel = 0) {
        return values[size_t(channel) * coeffs_per_channel() + index(l, m)];
    }
    double at(int l, int m, int channel = 0) const {
        return values[size_t(channel) * coeffs_per_channel() + index(l, m)];
    }

    const double* channel(int c) const { return values.data() + size_t(c) * coeffs_per_channel(); }
    double* channel(int c) { return values.data() + size_t(c) * coeffs_per_channel(); }

    ShCoefficients& operator+=(const ShCoefficients& o);
    ShCoefficients operator*(double s) const;
};

// Per-band dense rotation blocks of sizes 1, 3, 5, ..., 2*max_order+1.
// Block l is orthogonal; applying the blocks to a stacked coefficient vector
// rotates it: Y(R w) = blocks * Y(w).
struct ShRotation {
    int max_order = 0;
    std::vector<std::vector<double>> blocks;  // block l: (2l+1)^2, row-major

    double block_at(int l, int row, int col) const { return blocks[l][size_t(row) * (2 * l + 1) + col]; }

    ShCoefficients apply(const ShCoefficients& coeffs) const;
};

// Real SH basis at a unit direction. Directions within 1e-3 of unit length
// are normalized silently; anything farther off is an error.
ShCoefficients eval_sh_basis(const Vec3& dir, int max_order);

// Per-channel lat-long Riemann sum of Y_lm * E with sin(theta) solid-angle
// weights. This precomputes the environment's band integrals once per map.
ShCoefficients project_env_to_sh(const EnvMap& env, int max_order);

// Band-block rotation matrices from a 3x3 rotation (recursive construction).
ShRotation sh_rotation_matrix(const Mat3& rotation, int max_order);

// rotation applied per channel; throws on order mismatch with the rotation.
ShCoefficients rotate_env_coeffs(const ShCoefficients& coeffs, const Mat3& rotation);
ShCoefficients rotate_env_coeffs(const ShCoefficients& coeffs, const ShRotation& rotation);

// Banded dot product of a monochrome transfer against RGB environment
// coefficients; the transfer's order truncates the sum. May be negative.
Rgb integrate_radiance(const ShCoefficients& transfer, const ShCoefficients& env);

// Moving point light: coefficients captured with the light along +z at
// ref_distance are rotated so +z maps to dir and scaled by squared falloff
// (ref_distance / distance)^2.
ShCoefficients point_light_sh(const Vec3& dir, const ShCoefficients& radiance_coeffs_at_ref,
                              double ref_distance, double distance);

// Plain-text dump: header "sh-coeffs v1 order=<n> channels=<k>", then one
// "l m v..." line per coefficient.
void save_sh_text(const std::string& path, const ShCoefficients& coeffs);
ShCoefficients load_sh_text(const std::string& path);

}  // namespace eyevol

#endif

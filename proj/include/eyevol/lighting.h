// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_LIGHTING_H
#define EYEVOL_LIGHTING_H

#include <memory>
#include <optional>

#include "eyevol/envmap.h"
#include "eyevol/sh.h"
#include "eyevol/vecmath.h"

namespace eyevol {

// A point light captured once as SH at a reference distance, with the light
// along +z in the capture frame; per frame it sits at `direction` from the
// subject at `distance`.
struct MovingLight {
    ShCoefficients coeffs_at_ref;  // 3 channels
    double ref_distance = 1000.0;  // mm
    Vec3 direction{0, 0, 1};
    double distance = 1000.0;  // mm
};

// Everything point shading and terminal lookups need for one frame's
// illumination: summed environment SH (static env rotated for head rotation
// plus the falloff-scaled moving light), the raw map for reflected-ray
// terminals, and the learned radiance scale.
struct LightingContext {
    ShCoefficients env_sh{0, 3};
    std::shared_ptr<const EnvMap> env_map;
    Mat3 env_rotation;  // world dir -> map lookup dir uses the inverse
    double env_scale = 1.0;

    // env_scale * rotated-map radiance along a world direction.
    Rgb terminal_radiance(const Vec3& dir) const {
        return env_map->sample(env_rotation.transposed() * dir) * env_scale;
    }
};

// Projects (or reuses cached) static-environment SH, rotates it to compensate
// head rotation, adds the moving light's rotated and falloff-scaled SH, and
// attaches the scale factor.
LightingContext assemble_lighting(std::shared_ptr<const EnvMap> env, int max_order,
                                  const std::optional<MovingLight>& moving,
                                  const Mat3& head_rotation, double env_scale);

// Variant that reuses previously projected static-environment coefficients.
LightingContext assemble_lighting(std::shared_ptr<const EnvMap> env,
                                  const ShCoefficients& env_coeffs,
                                  const std::optional<MovingLight>& moving,
                                  const Mat3& head_rotation, double env_scale);

}  // namespace eyevol

#endif

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/lighting.h"

#include <stdexcept>

namespace eyevol {

LightingContext assemble_lighting(std::shared_ptr<const EnvMap> env,
                                  const ShCoefficients& env_coeffs,
                                  const std::optional<MovingLight>& moving,
                                  const Mat3& head_rotation, double env_scale) {
    if (env_scale <= 0) throw std::invalid_argument("assemble_lighting: env_scale must be positive");
    LightingContext ctx;
    ctx.env_map = std::move(env);
    ctx.env_rotation = head_rotation;
    ctx.env_scale = env_scale;
    ctx.env_sh = rotate_env_coeffs(env_coeffs, head_rotation);
    if (moving) {
        if (moving->coeffs_at_ref.max_order != env_coeffs.max_order)
            throw std::invalid_argument("assemble_lighting: moving-light SH order mismatch");
        Vec3 dir = head_rotation * normalize(moving->direction);
        ctx.env_sh += point_light_sh(dir, moving->coeffs_at_ref, moving->ref_distance,
                                     moving->distance);
    }
    return ctx;
}

LightingContext assemble_lighting(std::shared_ptr<const EnvMap> env, int max_order,
                                  const std::optional<MovingLight>& moving,
                                  const Mat3& head_rotation, double env_scale) {
    ShCoefficients projected = project_env_to_sh(*env, max_order);
    return assemble_lighting(std::move(env), projected, moving, head_rotation, env_scale);
}

}  // namespace eyevol

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_RAY_H
#define EYEVOL_RAY_H

#include <optional>

#include "eyevol/eye_model.h"
#include "eyevol/vecmath.h"

namespace eyevol {

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit
    double t_near = 0.0;
    double t_far = 1e30;

    Vec3 at(double t) const { return origin + dir * t; }
};

struct Hit {
    double t = 0;
    Vec3 position;
    Vec3 normal;  // interpolated shading normal, flipped toward the incoming side
    Vec3 barycentric;
    int face_index = -1;
    EyeRegion region = EyeRegion::Sclera;
    bool backface = false;  // geometric normal pointed away from the ray origin
};

// The cornea-interface split: camera segment up to the hit, plus refracted
// and reflected children weighted by the unpolarized Fresnel factor.
struct SplitRays {
    Ray pre;
    std::optional<Ray> refracted;
    std::optional<Ray> reflected;
    double fresnel_f = 0.0;
    std::optional<Hit> hit;
};

}  // namespace eyevol

#endif

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_CAMERA_H
#define EYEVOL_CAMERA_H

#include "eyevol/ray.h"
#include "eyevol/vecmath.h"

namespace eyevol {

// Pinhole camera. Extrinsics map world to camera space: p_cam = R p + t,
// looking down +z in camera space; pixel (0, 0) is the top-left corner.
struct Camera {
    double fx = 800, fy = 800;  // focal lengths in pixels
    double cx = 400, cy = 400;  // principal point
    int width = 800, height = 800;
    Mat3 rotation;     // world -> camera
    Vec3 translation;  // world -> camera

    void validate() const;
    Vec3 position() const { return rotation.transposed() * (translation * -1.0); }

    // World-space point -> pixel coordinates (no bounds check).
    Vec3 project(const Vec3& world_point) const;  // (u, v, depth)

    // Convenience: camera at `eye` looking at `target` with `up` hint.
    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal_px,
                          int width, int height);
};

// Ray through pixel (u + offset_u, v + offset_v); t range [t_near, t_far].
Ray camera_ray(const Camera& camera, int u, int v, double offset_u = 0.5, double offset_v = 0.5,
               double t_near = 0.0, double t_far = 1e30);

}  // namespace eyevol

#endif

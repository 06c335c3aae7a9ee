// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/camera.h"

#include <stdexcept>

namespace eyevol {

void Camera::validate() const {
    if (!(fx > 0) || !(fy > 0)) throw std::invalid_argument("camera: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw std::invalid_argument("camera: nonpositive resolution");
    if (!is_rotation_matrix(rotation)) throw std::invalid_argument("camera: extrinsic rotation invalid");
}

Vec3 Camera::project(const Vec3& world_point) const {
    Vec3 pc = rotation * world_point + translation;
    if (pc.z <= 0) throw std::invalid_argument("camera: point behind the camera");
    return {fx * pc.x / pc.z + cx, fy * pc.y / pc.z + cy, pc.z};
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal_px,
                       int width, int height) {
    Camera cam;
    cam.fx = cam.fy = focal_px;
    cam.width = width;
    cam.height = height;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    Vec3 fwd = normalize(target - eye);          // camera +z
    Vec3 right = normalize(cross(fwd, up));      // camera +x
    Vec3 down = cross(fwd, right);               // camera +y (image v grows downward)
    for (int j = 0; j < 3; j++) {
        cam.rotation(0, j) = right[j];
        cam.rotation(1, j) = down[j];
        cam.rotation(2, j) = fwd[j];
    }
    cam.translation = cam.rotation * eye * -1.0;
    return cam;
}

Ray camera_ray(const Camera& camera, int u, int v, double offset_u, double offset_v, double t_near,
               double t_far) {
    if (u < 0 || u >= camera.width || v < 0 || v >= camera.height)
        throw std::invalid_argument("camera_ray: pixel (" + std::to_string(u) + ", " +
                                    std::to_string(v) + ") out of bounds");
    double px = u + offset_u, py = v + offset_v;
    Vec3 dir_cam{(px - camera.cx) / camera.fx, (py - camera.cy) / camera.fy, 1.0};
    Ray ray;
    ray.origin = camera.position();
    ray.dir = normalize(camera.rotation.transposed() * dir_cam);
    ray.t_near = t_near;
    ray.t_far = t_far;
    return ray;
}

}  // namespace eyevol

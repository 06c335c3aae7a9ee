// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/optics.h"

#include <cmath>

namespace eyevol {

std::optional<Vec3> refract_dir(const Vec3& in_dir, const Vec3& normal, double eta_ratio) {
    double cos_i = -dot(in_dir, normal);
    double sin2_t = eta_ratio * eta_ratio * std::fmax(0.0, 1.0 - cos_i * cos_i);
    if (sin2_t > 1.0) return std::nullopt;  // total internal reflection
    double cos_t = std::sqrt(1.0 - sin2_t);
    return normalize(in_dir * eta_ratio + normal * (eta_ratio * cos_i - cos_t));
}

Vec3 reflect_dir(const Vec3& in_dir, const Vec3& normal) {
    return in_dir - normal * (2.0 * dot(in_dir, normal));
}

double fresnel_unpolarized(double cos_theta_i, double eta_i, double eta_t) {
    cos_theta_i = clamp(cos_theta_i, 0.0, 1.0);
    double sin_t = eta_i / eta_t * std::sqrt(std::fmax(0.0, 1.0 - cos_theta_i * cos_theta_i));
    if (sin_t >= 1.0) return 1.0;
    double cos_t = std::sqrt(1.0 - sin_t * sin_t);
    double rs = (eta_i * cos_theta_i - eta_t * cos_t) / (eta_i * cos_theta_i + eta_t * cos_t);
    double rp = (eta_t * cos_theta_i - eta_i * cos_t) / (eta_t * cos_theta_i + eta_i * cos_t);
    return 0.5 * (rs * rs + rp * rp);
}

SplitRays split_ray(const Ray& ray, const Bvh& bvh, double ior, bool sclera_ior_zero) {
    SplitRays split;
    split.pre = ray;
    std::optional<Hit> hit = bvh.intersect(ray);
    if (!hit) return split;

    split.hit = hit;
    split.pre.t_far = hit->t;

    const Vec3& n = hit->normal;  // already faces the incoming side
    double cos_i = -dot(ray.dir, n);
    bool suppress = sclera_ior_zero && hit->region == EyeRegion::Sclera;

    if (auto rdir = refract_dir(ray.dir, n, 1.0 / ior)) {
        Ray refracted;
        refracted.dir = *rdir;
        refracted.origin = hit->position + *rdir * kSelfIntersectEps;
        refracted.t_near = 0.0;
        refracted.t_far = ray.t_far - hit->t;
        split.refracted = refracted;
    }

    if (!suppress) {
        Vec3 rdir = reflect_dir(ray.dir, n);
        Ray reflected;
        reflected.dir = rdir;
        reflected.origin = hit->position + rdir * kSelfIntersectEps;
        reflected.t_near = 0.0;
        reflected.t_far = ray.t_far - hit->t;
        split.reflected = reflected;
        split.fresnel_f = fresnel_unpolarized(cos_i, 1.0, ior);
    }
    return split;
}

}  // namespace eyevol

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_OPTICS_H
#define EYEVOL_OPTICS_H

#include <optional>

#include "eyevol/bvh.h"
#include "eyevol/ray.h"

namespace eyevol {

inline constexpr double kCorneaIor = 1.4;
inline constexpr double kSelfIntersectEps = 1e-4;  // mm, child-ray origin offset

// Snell refraction of a unit incoming direction at a unit normal facing the
// incoming side; eta_ratio = eta_incident / eta_transmitted. Empty on total
// internal reflection.
std::optional<Vec3> refract_dir(const Vec3& in_dir, const Vec3& normal, double eta_ratio);

// Mirror reflection d - 2 (d.n) n.
Vec3 reflect_dir(const Vec3& in_dir, const Vec3& normal);

// Exact unpolarized Fresnel reflectance (Rs + Rp) / 2; 1 under TIR.
double fresnel_unpolarized(double cos_theta_i, double eta_i, double eta_t);

// Splits a camera ray at the eyeball surface into the pre-intersect segment
// plus refracted/reflected children with the Fresnel weight. With
// sclera_ior_zero, sclera hits keep the refracted ray (standard IOR) but get
// fresnel_f = 0 and no reflected ray, which suppresses sclera highlights.
SplitRays split_ray(const Ray& ray, const Bvh& bvh, double ior = kCorneaIor,
                    bool sclera_ior_zero = false);

}  // namespace eyevol

#endif

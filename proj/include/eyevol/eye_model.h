// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_EYE_MODEL_H
#define EYEVOL_EYE_MODEL_H

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "eyevol/vecmath.h"

namespace eyevol {

inline constexpr int kEyeMeshVertexCount = 10242;  // level-5 icosphere, 10 * 4^5 + 2

// Two-sphere eyeball shape: an eyeball sphere and a cornea sphere meeting at
// the iris circle (radius b at offset c from the eyeball center), blended
// smoothly at the limbus. Units are millimeters; the gaze axis is +z in
// canonical space, with the cornea bulging toward +z.
struct EyeShapeParams {
    double b = 6.0;             // iris radius
    double c = 10.5;            // iris offset from eyeball center
    double d = 5.25;            // distance between sphere centers
    double theta_mod = 2.0;     // blend slope, in [1, 3]
    double theta_offset = 0.5;  // blend offset, in [-0.5, 1.5]
    std::vector<double> vertex_offsets;  // empty = all zero, else 10242 signed mm

    void validate() const;
    bool has_offsets() const { return !vertex_offsets.empty(); }
};

// 6-DoF transform, axis-angle rotation (radians) then translation (mm).
struct Rigid6 {
    Vec3 rotation{0, 0, 0};
    Vec3 translation{0, 0, 0};

    Mat3 rotation_matrix() const { return rotation_from_axis_angle(rotation); }
    Vec3 apply(const Vec3& p) const { return rotation_matrix() * p + translation; }
};

// Effective pose = global o per_frame (global applied last).
struct EyePose {
    Rigid6 global;
    Rigid6 per_frame;

    Vec3 apply(const Vec3& p) const { return global.apply(per_frame.apply(p)); }
    Vec3 apply_inverse(const Vec3& p) const;
    Mat3 effective_rotation() const { return global.rotation_matrix() * per_frame.rotation_matrix(); }
    Vec3 effective_translation() const {
        return global.rotation_matrix() * per_frame.translation + global.translation;
    }
    Vec3 gaze_dir() const { return effective_rotation() * Vec3{0, 0, 1}; }

    static EyePose from_effective(const Mat3& rotation, const Vec3& translation);
};

enum class EyeRegion { Cornea, Limbus, Sclera };

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> normals;        // per-vertex unit shading normals
    std::vector<double> blend_alpha;  // per-vertex limbus blend weight (1 = eyeball sphere)

    EyeRegion region_at(int face, const Vec3& barycentric) const;
};

// (eyeball_radius, cornea_radius): both spheres pass through the iris circle.
std::pair<double, double> derive_radii(const EyeShapeParams& params);

// Unit icosphere with 10 * 4^level + 2 vertices.
TriMesh icosphere(int level);

// Blend weight for a canonical direction: smoothstep(theta_mod * theta_diff +
// theta_offset) with theta_diff = (angle from +z) - (iris half-angle).
// alpha = 1 selects the eyeball sphere, alpha = 0 the cornea sphere.
double blend_alpha_for_direction(const EyeShapeParams& params, const Vec3& dir);

// The blended two-sphere surface discretized over the level-5 icosphere,
// displaced along pre-displacement shading normals by vertex_offsets.
TriMesh generate_mesh(const EyeShapeParams& params);

// Per-vertex normals from neighboring face normals weighted by the face's
// interior angle at the vertex.
std::vector<Vec3> shading_normals(const TriMesh& mesh);

TriMesh apply_pose(const TriMesh& mesh, const EyePose& pose);

// Region of a canonical point lying on the analytic blended surface; throws
// if the point is farther than `tolerance` (mm) from that surface.
EyeRegion classify_region(const EyeShapeParams& params, const Vec3& canonical_point,
                          double tolerance = 0.5);

// Blend-derived region from an alpha value.
EyeRegion region_from_alpha(double alpha);

double mesh_signed_volume(const TriMesh& mesh);

void save_obj(const std::string& path, const TriMesh& mesh);

}  // namespace eyevol

#endif

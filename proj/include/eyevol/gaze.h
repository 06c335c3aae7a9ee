// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_GAZE_H
#define EYEVOL_GAZE_H

#include <array>
#include <map>
#include <vector>

#include "eyevol/eye_model.h"
#include "eyevol/warp.h"

namespace eyevol {

// Training gaze directions on the unit sphere with a triangulation covering
// their convex hull.
struct GazeSphere {
    std::vector<int> frame_ids;
    std::vector<Vec3> gaze_dirs;                   // unit
    std::vector<std::array<int, 3>> triangles;     // indices into gaze_dirs
};

// The three training frames bracketing a target gaze and their barycentric
// weights (nonnegative, summing to 1); frames sorted ascending.
struct GazeBlend {
    std::array<int, 3> frame_ids;
    Vec3 weights;
};

// Projects every pose's gaze onto the unit sphere and triangulates the point
// set's convex hull (coplanar sets fall back to a fan over the planar hull).
// Gazes closer than 1e-6 rad are deduplicated. Throws with fewer than 3
// distinct usable gazes.
GazeSphere build_gaze_sphere(const std::map<int, EyePose>& poses);

// Intersects the ray from the origin along `target` with the gaze mesh;
// throws "gaze outside training distribution" when it misses.
GazeBlend locate_gaze(const GazeSphere& gs, const Vec3& target);

// Linear blend of the three frames' warped points.
Vec3 blend_warp(const GazeBlend& blend, const WarpField& warps, const Vec3& world_point);

// Barycentric translation; rotation by re-aiming each sample pose to the
// target gaze and slerping the results sequentially (ascending frame order).
EyePose interpolate_pose(const GazeBlend& blend, const std::map<int, EyePose>& poses,
                         const Vec3& target);

}  // namespace eyevol

#endif

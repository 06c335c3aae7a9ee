// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/gaze.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace eyevol {

namespace {

constexpr double kHullEps = 1e-12;

struct HullFace {
    int a, b, c;
};

// Orient (a, b, c) so its normal points away from `interior`.
HullFace oriented(int a, int b, int c, const std::vector<Vec3>& pts, const Vec3& interior) {
    Vec3 n = cross(pts[b] - pts[a], pts[c] - pts[a]);
    if (dot(n, pts[a] - interior) < 0) return {a, c, b};
    return {a, b, c};
}

// Fan triangulation of the planar convex hull (Andrew's monotone chain in the
// plane's 2D frame); used when all gaze points are coplanar.
std::vector<HullFace> coplanar_fan(const std::vector<Vec3>& pts, const Vec3& plane_normal) {
    Vec3 u = std::fabs(plane_normal.x) < 0.9 ? cross(plane_normal, Vec3{1, 0, 0})
                                             : cross(plane_normal, Vec3{0, 1, 0});
    u = normalize(u);
    Vec3 v = cross(plane_normal, u);
    struct P2 {
        double x, y;
        int idx;
        bool operator<(const P2& o) const { return x < o.x || (x == o.x && y < o.y); }
    };
    std::vector<P2> p2;
    p2.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); i++) p2.push_back({dot(pts[i], u), dot(pts[i], v), int(i)});
    std::sort(p2.begin(), p2.end());
    auto turn = [](const P2& o, const P2& a, const P2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<P2> hull(2 * p2.size());
    size_t k = 0;
    for (const auto& pt : p2) {  // lower
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], pt) <= 0) k--;
        hull[k++] = pt;
    }
    for (size_t i = p2.size() - 1, lo = k + 1; i-- > 0;) {  // upper
        while (k >= lo && turn(hull[k - 2], hull[k - 1], p2[i]) <= 0) k--;
        hull[k++] = p2[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw std::runtime_error("gaze sphere: degenerate coplanar gaze set");
    // The points sit on the unit sphere, so the origin is on the inner side
    // of the plane; orient away from it.
    std::vector<HullFace> faces;
    for (size_t i = 1; i + 1 < hull.size(); i++)
        faces.push_back(oriented(hull[0].idx, hull[i].idx, hull[i + 1].idx, pts, Vec3{0, 0, 0}));
    return faces;
}

// Incremental 3D convex hull; points are unit gaze directions, so the scale
// is well conditioned.
std::vector<HullFace> convex_hull(const std::vector<Vec3>& pts) {
    size_t n = pts.size();
    if (n == 3) {
        Vec3 centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
        return {oriented(0, 1, 2, pts, centroid - normalize(centroid))};
    }

    // Initial tetrahedron from 4 non-coplanar points.
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    for (size_t i = 1; i < n && i1 < 0; i++)
        if (distance(pts[i], pts[i0]) > 1e-9) i1 = int(i);
    if (i1 < 0) throw std::runtime_error("gaze sphere: all gazes identical");
    for (size_t i = 1; i < n && i2 < 0; i++)
        if (norm(cross(pts[i1] - pts[i0], pts[i] - pts[i0])) > 1e-9) i2 = int(i);
    if (i2 < 0) throw std::runtime_error("gaze sphere: gazes are collinear");
    Vec3 plane_n = normalize(cross(pts[i1] - pts[i0], pts[i2] - pts[i0]));
    for (size_t i = 1; i < n && i3 < 0; i++)
        if (std::fabs(dot(pts[i] - pts[i0], plane_n)) > 1e-9) i3 = int(i);
    if (i3 < 0) return coplanar_fan(pts, plane_n);

    Vec3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    std::vector<HullFace> faces = {oriented(i0, i1, i2, pts, interior),
                                   oriented(i0, i1, i3, pts, interior),
                                   oriented(i0, i2, i3, pts, interior),
                                   oriented(i1, i2, i3, pts, interior)};

    for (int p = 0; p < int(n); p++) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        // Faces visible from pts[p].
        std::vector<HullFace> kept;
        std::vector<HullFace> removed;
        for (const auto& f : faces) {
            Vec3 fn = cross(pts[f.b] - pts[f.a], pts[f.c] - pts[f.a]);
            if (dot(fn, pts[p] - pts[f.a]) > kHullEps)
                removed.push_back(f);
            else
                kept.push_back(f);
        }
        if (removed.empty()) continue;
        // Horizon edges: edges of removed faces not shared by two removed faces.
        auto edge_key = [](int a, int b) { return std::pair(std::min(a, b), std::max(a, b)); };
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& f : removed) {
            edge_count[edge_key(f.a, f.b)]++;
            edge_count[edge_key(f.b, f.c)]++;
            edge_count[edge_key(f.c, f.a)]++;
        }
        faces = std::move(kept);
        for (const auto& f : removed) {
            std::array<std::pair<int, int>, 3> edges = {{{f.a, f.b}, {f.b, f.c}, {f.c, f.a}}};
            for (const auto& [ea, eb] : edges) {
                if (edge_count[edge_key(ea, eb)] != 1) continue;
                // Winding of the removed face is preserved by (ea, eb, p).
                faces.push_back({ea, eb, p});
            }
        }
    }
    return faces;
}

}  // namespace

GazeSphere build_gaze_sphere(const std::map<int, EyePose>& poses) {
    GazeSphere gs;
    for (const auto& [id, pose] : poses) {
        Vec3 g = normalize(pose.gaze_dir());
        bool duplicate = false;
        for (const auto& existing : gs.gaze_dirs)
            if (std::acos(clamp(dot(existing, g), -1.0, 1.0)) < 1e-6) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        gs.frame_ids.push_back(id);
        gs.gaze_dirs.push_back(g);
    }
    if (gs.gaze_dirs.size() < 3)
        throw std::runtime_error("gaze sphere: need at least 3 distinct gaze directions");

    for (const auto& f : convex_hull(gs.gaze_dirs)) gs.triangles.push_back({f.a, f.b, f.c});
    if (gs.triangles.empty()) throw std::runtime_error("gaze sphere: triangulation failed");
    return gs;
}

GazeBlend locate_gaze(const GazeSphere& gs, const Vec3& target) {
    Vec3 dir = normalize(target);
    double best_t = -1;
    int best_tri = -1;
    Vec3 best_bary;
    for (size_t ti = 0; ti < gs.triangles.size(); ti++) {
        const auto& tri = gs.triangles[ti];
        const Vec3& a = gs.gaze_dirs[tri[0]];
        Vec3 e1 = gs.gaze_dirs[tri[1]] - a;
        Vec3 e2 = gs.gaze_dirs[tri[2]] - a;
        Vec3 p = cross(dir, e2);
        double det = dot(e1, p);
        if (std::fabs(det) < 1e-14) continue;
        double inv = 1.0 / det;
        Vec3 s = Vec3{0, 0, 0} - a;
        double u = dot(s, p) * inv;
        if (u < -1e-9 || u > 1 + 1e-9) continue;
        Vec3 q = cross(s, e1);
        double v = dot(dir, q) * inv;
        if (v < -1e-9 || u + v > 1 + 1e-9) continue;
        double t = dot(e2, q) * inv;
        if (t <= 1e-9) continue;
        // Keep the intersection farthest from the origin: that is the
        // spherical side of the hull rather than its planar base.
        if (t > best_t) {
            best_t = t;
            best_tri = int(ti);
            best_bary = {1.0 - u - v, u, v};
        }
    }
    if (best_tri < 0) throw std::runtime_error("gaze outside training distribution");

    const auto& tri = gs.triangles[best_tri];
    GazeBlend blend;
    std::array<std::pair<int, double>, 3> entries = {
        {{gs.frame_ids[tri[0]], std::fmax(best_bary.x, 0.0)},
         {gs.frame_ids[tri[1]], std::fmax(best_bary.y, 0.0)},
         {gs.frame_ids[tri[2]], std::fmax(best_bary.z, 0.0)}}};
    std::sort(entries.begin(), entries.end());
    double sum = entries[0].second + entries[1].second + entries[2].second;
    blend.frame_ids = {entries[0].first, entries[1].first, entries[2].first};
    blend.weights = {entries[0].second / sum, entries[1].second / sum, entries[2].second / sum};
    return blend;
}

Vec3 blend_warp(const GazeBlend& blend, const WarpField& warps, const Vec3& world_point) {
    Vec3 out{0, 0, 0};
    for (int i = 0; i < 3; i++) {
        if (!warps.has_frame(blend.frame_ids[i]))
            throw std::invalid_argument("blend_warp: missing warp for frame " +
                                        std::to_string(blend.frame_ids[i]));
        out += warps.warp(blend.frame_ids[i], world_point) * blend.weights[i];
    }
    return out;
}

EyePose interpolate_pose(const GazeBlend& blend, const std::map<int, EyePose>& poses,
                         const Vec3& target) {
    Vec3 dir = normalize(target);
    Vec3 translation{0, 0, 0};
    std::array<Quat, 3> aimed;
    for (int i = 0; i < 3; i++) {
        auto it = poses.find(blend.frame_ids[i]);
        if (it == poses.end())
            throw std::invalid_argument("interpolate_pose: missing pose for frame " +
                                        std::to_string(blend.frame_ids[i]));
        const EyePose& pose = it->second;
        translation += pose.effective_translation() * blend.weights[i];
        Quat q = quat_from_matrix(pose.effective_rotation());
        // Re-aim this sample's gaze to the target, then interpolate within
        // the set of rotations sharing that gaze image.
        Quat re_aim = rotation_between(normalize(pose.gaze_dir()), dir);
        aimed[i] = (re_aim * q).normalized();
    }

    double w1 = blend.weights.x, w2 = blend.weights.y, w3 = blend.weights.z;
    Quat q;
    if (w1 + w2 < 1e-15) {
        q = aimed[2];
    } else {
        Quat q12 = slerp(aimed[0], aimed[1], w2 / (w1 + w2));
        q = slerp(q12, aimed[2], w3);
    }
    return EyePose::from_effective(q.to_matrix(), translation);
}

}  // namespace eyevol

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/eye_model.h"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace eyevol {

void EyeShapeParams::validate() const {
    if (!(b > 0)) throw std::invalid_argument("eye shape: iris radius b must be > 0");
    if (!(c > 0)) throw std::invalid_argument("eye shape: iris offset c must be > 0");
    if (!(d >= 0)) throw std::invalid_argument("eye shape: cornea offset d must be >= 0");
    if (!(d < c)) throw std::invalid_argument("eye shape: cornea offset d must be < c");
    if (theta_mod < 1.0 || theta_mod > 3.0)
        throw std::invalid_argument("eye shape: theta_mod must lie in [1, 3]");
    if (theta_offset < -0.5 || theta_offset > 1.5)
        throw std::invalid_argument("eye shape: theta_offset must lie in [-0.5, 1.5]");
    if (!vertex_offsets.empty() && int(vertex_offsets.size()) != kEyeMeshVertexCount)
        throw std::invalid_argument("eye shape: vertex_offsets must have 10242 entries");
}

Vec3 EyePose::apply_inverse(const Vec3& p) const {
    Vec3 q = global.rotation_matrix().transposed() * (p - global.translation);
    return per_frame.rotation_matrix().transposed() * (q - per_frame.translation);
}

EyePose EyePose::from_effective(const Mat3& rotation, const Vec3& translation) {
    EyePose pose;
    pose.per_frame.rotation = quat_from_matrix(rotation).to_axis_angle();
    pose.per_frame.translation = translation;
    return pose;
}

std::pair<double, double> derive_radii(const EyeShapeParams& params) {
    params.validate();
    double eyeball = std::sqrt(params.b * params.b + params.c * params.c);
    double rim = params.c - params.d;
    double cornea = std::sqrt(params.b * params.b + rim * rim);
    return {eyeball, cornea};
}

// -----------------------------------------------------------------------------
// Icosphere
// -----------------------------------------------------------------------------

TriMesh icosphere(int level) {
    if (level < 0) throw std::invalid_argument("icosphere: negative level");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                     {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                     {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& v : mesh.vertices) v = normalize(v);

    for (int pass = 0; pass < level; pass++) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int idx = int(mesh.vertices.size());
            mesh.vertices.push_back(normalize(mesh.vertices[a] + mesh.vertices[b]));
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> faces;
        faces.reserve(mesh.faces.size() * 4);
        for (auto& f : mesh.faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            faces.push_back({f[0], ab, ca});
            faces.push_back({f[1], bc, ab});
            faces.push_back({f[2], ca, bc});
            faces.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(faces);
    }
    mesh.normals = mesh.vertices;  // unit sphere
    return mesh;
}

// -----------------------------------------------------------------------------
// Blended two-sphere surface
// -----------------------------------------------------------------------------

static double smoothstep(double t) {
    t = clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double blend_alpha_for_direction(const EyeShapeParams& params, const Vec3& dir) {
    double theta = std::acos(clamp(dir.z / norm(dir), -1.0, 1.0));
    double theta_iris = std::atan2(params.b, params.c);
    double theta_diff = theta - theta_iris;
    return smoothstep(params.theta_mod * theta_diff + params.theta_offset);
}

// Point on the blended surface along canonical direction dir (unit).
static Vec3 blended_surface_point(const EyeShapeParams& params, double eyeball_r, double cornea_r,
                                  const Vec3& dir, double alpha) {
    Vec3 eyeball_pt = dir * eyeball_r;
    // Ray-sphere against the cornea sphere centered at (0, 0, d); take the far
    // root (front side). When the ray misses (possible far behind the limbus
    // where alpha is already 1), fall back to the closest-approach distance.
    double disc = params.d * params.d * dir.z * dir.z - params.d * params.d + cornea_r * cornea_r;
    double tc = params.d * dir.z + std::sqrt(std::fmax(0.0, disc));
    Vec3 cornea_pt = dir * std::fmax(tc, 0.0);
    return cornea_pt * (1.0 - alpha) + eyeball_pt * alpha;
}

std::vector<Vec3> shading_normals(const TriMesh& mesh) {
    std::vector<Vec3> accum(mesh.vertices.size(), Vec3{0, 0, 0});
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        Vec3 n = cross(b - a, c - a);
        double len = norm(n);
        if (len < 1e-14) continue;  // zero-area face contributes nothing
        n = n / len;
        for (int k = 0; k < 3; k++) {
            const Vec3& p = mesh.vertices[f[k]];
            const Vec3& q = mesh.vertices[f[(k + 1) % 3]];
            const Vec3& r = mesh.vertices[f[(k + 2) % 3]];
            Vec3 e1 = q - p, e2 = r - p;
            double denom = norm(e1) * norm(e2);
            if (denom < 1e-14) continue;
            double angle = std::acos(clamp(dot(e1, e2) / denom, -1.0, 1.0));
            accum[f[k]] += n * angle;
        }
    }
    std::vector<Vec3> normals(mesh.vertices.size());
    for (size_t i = 0; i < accum.size(); i++) {
        double len = norm(accum[i]);
        if (len < 1e-12)
            throw std::runtime_error("shading_normals: degenerate vertex " + std::to_string(i));
        normals[i] = accum[i] / len;
    }
    return normals;
}

TriMesh generate_mesh(const EyeShapeParams& params) {
    params.validate();
    auto [eyeball_r, cornea_r] = derive_radii(params);
    TriMesh mesh = icosphere(5);
    if (int(mesh.vertices.size()) != kEyeMeshVertexCount)
        throw std::logic_error("generate_mesh: unexpected base vertex count");

    mesh.blend_alpha.resize(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); i++) {
        Vec3 dir = mesh.vertices[i];  // unit, from icosphere
        double alpha = blend_alpha_for_direction(params, dir);
        mesh.blend_alpha[i] = alpha;
        mesh.vertices[i] = blended_surface_point(params, eyeball_r, cornea_r, dir, alpha);
    }

    if (params.has_offsets()) {
        // Displace along the pre-displacement surface normals.
        std::vector<Vec3> base_normals = shading_normals(mesh);
        for (size_t i = 0; i < mesh.vertices.size(); i++)
            mesh.vertices[i] += base_normals[i] * params.vertex_offsets[i];
    }
    mesh.normals = shading_normals(mesh);
    return mesh;
}

TriMesh apply_pose(const TriMesh& mesh, const EyePose& pose) {
    TriMesh out = mesh;
    Mat3 rot = pose.effective_rotation();
    for (auto& v : out.vertices) v = pose.apply(v);
    for (auto& n : out.normals) n = rot * n;
    return out;
}

EyeRegion region_from_alpha(double alpha) {
    if (alpha <= 1e-9) return EyeRegion::Cornea;
    if (alpha >= 1.0 - 1e-9) return EyeRegion::Sclera;
    return EyeRegion::Limbus;
}

EyeRegion TriMesh::region_at(int face, const Vec3& barycentric) const {
    if (blend_alpha.empty()) throw std::logic_error("region_at: mesh has no blend weights");
    const auto& f = faces[face];
    double alpha = barycentric.x * blend_alpha[f[0]] + barycentric.y * blend_alpha[f[1]] +
                   barycentric.z * blend_alpha[f[2]];
    return region_from_alpha(alpha);
}

EyeRegion classify_region(const EyeShapeParams& params, const Vec3& canonical_point,
                          double tolerance) {
    params.validate();
    double r = norm(canonical_point);
    if (r < 1e-9) throw std::invalid_argument("classify_region: point at the eyeball center");
    Vec3 dir = canonical_point / r;
    double alpha = blend_alpha_for_direction(params, dir);
    auto [eyeball_r, cornea_r] = derive_radii(params);
    Vec3 on_surface = blended_surface_point(params, eyeball_r, cornea_r, dir, alpha);
    double off = distance(canonical_point, on_surface);
    double slack = tolerance;
    for (double o : params.vertex_offsets) slack = std::fmax(slack, tolerance + std::fabs(o));
    if (off > slack)
        throw std::invalid_argument("classify_region: point is " + std::to_string(off) +
                                    " mm off the surface");
    return region_from_alpha(alpha);
}

double mesh_signed_volume(const TriMesh& mesh) {
    double vol = 0;
    for (const auto& f : mesh.faces)
        vol += dot(mesh.vertices[f[0]], cross(mesh.vertices[f[1]], mesh.vertices[f[2]]));
    return vol / 6.0;
}

void save_obj(const std::string& path, const TriMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("obj: cannot open for write: " + path);
    out.precision(9);
    for (const auto& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& n : mesh.normals) out << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << "//" << f[0] + 1 << " " << f[1] + 1 << "//" << f[1] + 1 << " "
            << f[2] + 1 << "//" << f[2] + 1 << "\n";
    if (!out) throw std::runtime_error("obj: write failed: " + path);
}

}  // namespace eyevol

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/bvh.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace eyevol {

static constexpr int kLeafSize = 4;

Bvh::Bvh(const TriMesh& mesh) : mesh_(mesh) {
    if (mesh.faces.empty()) throw std::invalid_argument("bvh: empty mesh");
    std::vector<Vec3> centroids(mesh.faces.size());
    for (size_t i = 0; i < mesh.faces.size(); i++) {
        const auto& f = mesh.faces[i];
        centroids[i] =
            (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) * (1.0 / 3.0);
    }
    std::vector<int> tris(mesh.faces.size());
    for (size_t i = 0; i < tris.size(); i++) tris[i] = int(i);
    nodes_.reserve(2 * mesh.faces.size());
    build_node(tris, 0, int(tris.size()), centroids);
    tri_order_ = std::move(tris);
}

int Bvh::build_node(std::vector<int>& tris, int begin, int end,
                    const std::vector<Vec3>& centroids) {
    Node node;
    node.bmin = Vec3{1e30, 1e30, 1e30};
    node.bmax = Vec3{-1e30, -1e30, -1e30};
    for (int i = begin; i < end; i++) {
        const auto& f = mesh_.faces[tris[i]];
        for (int k = 0; k < 3; k++) {
            const Vec3& v = mesh_.vertices[f[k]];
            node.bmin = {std::fmin(node.bmin.x, v.x), std::fmin(node.bmin.y, v.y),
                         std::fmin(node.bmin.z, v.z)};
            node.bmax = {std::fmax(node.bmax.x, v.x), std::fmax(node.bmax.y, v.y),
                         std::fmax(node.bmax.z, v.z)};
        }
    }
    int index = int(nodes_.size());
    nodes_.push_back(node);

    int n = end - begin;
    if (n <= kLeafSize) {
        nodes_[index].first = begin;
        nodes_[index].count = n;
        return index;
    }

    // Split along the widest centroid axis at the median.
    Vec3 ext = node.bmax - node.bmin;
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > (axis == 0 ? ext.x : ext.y)) axis = 2;
    int mid = begin + n / 2;
    std::nth_element(tris.begin() + begin, tris.begin() + mid, tris.begin() + end,
                     [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });

    int left = build_node(tris, begin, mid, centroids);
    int right = build_node(tris, mid, end, centroids);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

// Moller-Trumbore.
bool Bvh::intersect_triangle(const Ray& ray, int face, double& t, Vec3& bary) const {
    const auto& f = mesh_.faces[face];
    const Vec3& a = mesh_.vertices[f[0]];
    Vec3 e1 = mesh_.vertices[f[1]] - a;
    Vec3 e2 = mesh_.vertices[f[2]] - a;
    Vec3 p = cross(ray.dir, e2);
    double det = dot(e1, p);
    if (std::fabs(det) < 1e-14) return false;
    double inv_det = 1.0 / det;
    Vec3 s = ray.origin - a;
    double u = dot(s, p) * inv_det;
    if (u < 0 || u > 1) return false;
    Vec3 q = cross(s, e1);
    double v = dot(ray.dir, q) * inv_det;
    if (v < 0 || u + v > 1) return false;
    double tt = dot(e2, q) * inv_det;
    if (tt <= ray.t_near || tt >= ray.t_far) return false;
    t = tt;
    bary = {1.0 - u - v, u, v};
    return true;
}

Hit Bvh::make_hit(const Ray& ray, int face, double t, const Vec3& bary) const {
    Hit hit;
    hit.t = t;
    hit.position = ray.at(t);
    hit.barycentric = bary;
    hit.face_index = face;
    const auto& f = mesh_.faces[face];
    Vec3 n = mesh_.normals[f[0]] * bary.x + mesh_.normals[f[1]] * bary.y +
             mesh_.normals[f[2]] * bary.z;
    n = normalize(n);
    Vec3 geo = cross(mesh_.vertices[f[1]] - mesh_.vertices[f[0]],
                     mesh_.vertices[f[2]] - mesh_.vertices[f[0]]);
    hit.backface = dot(geo, ray.dir) > 0;
    if (dot(n, ray.dir) > 0) n = -n;  // face the incoming side
    hit.normal = n;
    if (!mesh_.blend_alpha.empty()) hit.region = mesh_.region_at(face, bary);
    return hit;
}

static bool hit_box(const Vec3& bmin, const Vec3& bmax, const Ray& ray, double t_best) {
    double t0 = ray.t_near, t1 = std::fmin(ray.t_far, t_best);
    for (int a = 0; a < 3; a++) {
        double inv = 1.0 / ray.dir[a];
        double lo = (bmin[a] - ray.origin[a]) * inv;
        double hi = (bmax[a] - ray.origin[a]) * inv;
        if (inv < 0) std::swap(lo, hi);
        t0 = std::fmax(t0, lo);
        t1 = std::fmin(t1, hi);
        if (t0 > t1) return false;
    }
    return true;
}

std::optional<Hit> Bvh::intersect(const Ray& ray) const {
    double best_t = std::numeric_limits<double>::infinity();
    int best_face = -1;
    Vec3 best_bary;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!hit_box(node.bmin, node.bmax, ray, best_t)) continue;
        if (node.is_leaf()) {
            for (int i = node.first; i < node.first + node.count; i++) {
                double t;
                Vec3 bary;
                if (intersect_triangle(ray, tri_order_[i], t, bary) && t < best_t) {
                    best_t = t;
                    best_face = tri_order_[i];
                    best_bary = bary;
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    if (best_face < 0) return std::nullopt;
    return make_hit(ray, best_face, best_t, best_bary);
}

std::optional<Hit> Bvh::intersect_brute_force(const Ray& ray) const {
    double best_t = std::numeric_limits<double>::infinity();
    int best_face = -1;
    Vec3 best_bary;
    for (size_t face = 0; face < mesh_.faces.size(); face++) {
        double t;
        Vec3 bary;
        if (intersect_triangle(ray, int(face), t, bary) && t < best_t) {
            best_t = t;
            best_face = int(face);
            best_bary = bary;
        }
    }
    if (best_face < 0) return std::nullopt;
    return make_hit(ray, best_face, best_t, best_bary);
}

}  // namespace eyevol

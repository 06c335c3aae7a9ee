// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_BVH_H
#define EYEVOL_BVH_H

#include <optional>
#include <vector>

#include "eyevol/ray.h"

namespace eyevol {

// Binary midpoint-split BVH over a triangle mesh. Queries return the nearest
// hit in (t_near, t_far) regardless of facing; the hit's shading normal is
// interpolated and flipped toward the incoming ray side.
class Bvh {
public:
    explicit Bvh(const TriMesh& mesh);

    std::optional<Hit> intersect(const Ray& ray) const;

    // Reference all-triangles test with identical semantics (used as the
    // correctness oracle for the tree).
    std::optional<Hit> intersect_brute_force(const Ray& ray) const;

private:
    struct Node {
        Vec3 bmin, bmax;
        int left = -1, right = -1;  // children, or
        int first = 0, count = 0;   // leaf triangle range
        bool is_leaf() const { return count > 0; }
    };

    const TriMesh& mesh_;
    std::vector<Node> nodes_;
    std::vector<int> tri_order_;

    int build_node(std::vector<int>& tris, int begin, int end,
                   const std::vector<Vec3>& centroids);
    bool intersect_triangle(const Ray& ray, int face, double& t, Vec3& bary) const;
    Hit make_hit(const Ray& ray, int face, double t, const Vec3& bary) const;
};

}  // namespace eyevol

#endif

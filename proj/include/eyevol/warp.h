// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_WARP_H
#define EYEVOL_WARP_H

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "eyevol/eye_model.h"
#include "eyevol/vecmath.h"

namespace eyevol {

// Per-frame mapping from deformed world space to the canonical volume for
// points outside the eyeball (the periocular region).
class WarpField {
public:
    virtual ~WarpField() = default;
    virtual Vec3 warp(int frame, const Vec3& world_point) const = 0;
    virtual bool has_frame(int frame) const = 0;
};

// Checks frame membership before delegating; throws on unknown frames.
Vec3 warp_point(const WarpField& warp, int frame, const Vec3& world_point);

class IdentityWarp : public WarpField {
public:
    Vec3 warp(int, const Vec3& p) const override { return p; }
    bool has_frame(int) const override { return true; }
};

class RigidWarp : public WarpField {
public:
    void set_frame(int frame, const Rigid6& transform) { frames_[frame] = transform; }
    Vec3 warp(int frame, const Vec3& p) const override;
    bool has_frame(int frame) const override { return frames_.count(frame) > 0; }

private:
    std::map<int, Rigid6> frames_;
};

// Stored displacement lattice per frame, trilinearly interpolated; points
// outside the lattice bounds use edge-clamped interpolation so the mapping
// stays continuous.
class LatticeWarp : public WarpField {
public:
    LatticeWarp(const Vec3& bounds_min, const Vec3& bounds_max, int nx, int ny, int nz);

    void set_displacement(int frame, int i, int j, int k, const Vec3& disp);
    // Fills a frame's lattice from a smooth deformation function.
    void set_frame_from_function(int frame, const std::function<Vec3(const Vec3&)>& displacement);

    Vec3 warp(int frame, const Vec3& p) const override;
    bool has_frame(int frame) const override { return frames_.count(frame) > 0; }

    Vec3 node_position(int i, int j, int k) const;

    void save(const std::string& path) const;
    static LatticeWarp load(const std::string& path);

private:
    Vec3 bmin_, bmax_;
    int nx_, ny_, nz_;
    std::map<int, std::vector<float>> frames_;  // 3 floats per node, x-fastest

    int index(int i, int j, int k) const { return i + nx_ * (j + ny_ * k); }
};

// Canonical point for a sample inside the eyeball: inverse rigid pose plus a
// constant offset that keeps the eye-interior canonical volume disjoint from
// the periocular one.
Vec3 eye_interior_transform(const EyePose& pose, const Vec3& world_point,
                            const Vec3& interior_offset);

inline constexpr Vec3 kDefaultInteriorOffset{0, 0, -100};  // mm

}  // namespace eyevol

#endif

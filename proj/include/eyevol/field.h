// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_FIELD_H
#define EYEVOL_FIELD_H

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eyevol/sh.h"
#include "eyevol/vecmath.h"

namespace eyevol {

inline constexpr int kDiffuseOrder = 5;   // 36 coefficients
inline constexpr int kSpecularOrder = 8;  // 81 coefficients

// One radiance-field sample: opacity density (per mm), albedo, and the
// monochrome diffuse/specular SH transfer functions.
struct FieldSample {
    double sigma = 0.0;
    Rgb albedo{0, 0, 0};
    ShCoefficients diffuse_sh{kDiffuseOrder, 1};
    ShCoefficients specular_sh{kSpecularOrder, 1};

    // sigma >= 0, albedo in [0,1]^3, positive 0th-degree transfer.
    void validate() const;
};

struct FieldQuery {
    Vec3 canonical_point;
    Vec3 world_point;
    Vec3 view_dir{0, 0, 1};  // unit
    bool shadow_branch_enabled = true;
};

class RadianceField {
public:
    virtual ~RadianceField() = default;
    virtual FieldSample query(const FieldQuery& q) const = 0;
};

// Field defined by a callable; used for analytic test fields, which may
// condition specular transfer on the view direction.
class AnalyticField : public RadianceField {
public:
    using Fn = std::function<FieldSample(const FieldQuery&)>;
    explicit AnalyticField(Fn fn) : fn_(std::move(fn)) {}
    FieldSample query(const FieldQuery& q) const override { return fn_(q); }

private:
    Fn fn_;
};

// Axis-aligned lattice of FieldSample payloads with trilinear interpolation
// over the canonical point. Nodes sit at bounds corners and are spaced
// (size / (dim - 1)) apart; queries outside the bounds return vacuum. The
// stored specular transfer is view-independent.
class VoxelShField : public RadianceField {
public:
    VoxelShField(const Vec3& bounds_min, const Vec3& bounds_max, int nx, int ny, int nz);

    FieldSample query(const FieldQuery& q) const override;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    Vec3 bounds_min() const { return bmin_; }
    Vec3 bounds_max() const { return bmax_; }
    int voxel_count() const { return nx_ * ny_ * nz_; }
    int values_per_voxel() const { return 4 + nd_ + ns_; }  // sigma, albedo, transfer

    Vec3 node_position(int i, int j, int k) const;

    FieldSample voxel(int i, int j, int k) const;
    void set_voxel(int i, int j, int k, const FieldSample& sample);

    float* voxel_data(int i, int j, int k) { return &payload_[size_t(index(i, j, k)) * values_per_voxel()]; }
    const float* voxel_data(int i, int j, int k) const {
        return &payload_[size_t(index(i, j, k)) * values_per_voxel()];
    }

    // Trilinear attribution of a canonical point: writes up to 8 (node index,
    // weight) pairs, returns the count (0 outside the bounds). The weights
    // are exactly the interpolation weights used by query().
    int gather(const Vec3& canonical, int* indices, double* weights) const;

    // Clamps payload onto the FieldSample constraint set (sigma >= 0, albedo
    // in [0,1], 0th-degree transfer >= floor), then validates.
    void enforce_constraints(double zeroth_floor = 1e-6);
    void validate_payload() const;

    void save(const std::string& path) const;
    static VoxelShField load(const std::string& path);

    int index(int i, int j, int k) const { return i + nx_ * (j + ny_ * k); }

private:
    Vec3 bmin_, bmax_;
    int nx_, ny_, nz_;
    int nd_, ns_;
    std::vector<float> payload_;  // x-fastest
};

// Named analytic fields available to scene configs ("vacuum", "debug-sphere").
std::shared_ptr<RadianceField> make_named_field(const std::string& name);

}  // namespace eyevol

#endif

// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/field.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace eyevol {

void FieldSample::validate() const {
    if (!(sigma >= 0) || !std::isfinite(sigma))
        throw std::runtime_error("field sample: opacity must be finite and >= 0");
    for (int c = 0; c < 3; c++)
        if (!(albedo[c] >= 0 && albedo[c] <= 1))
            throw std::runtime_error("field sample: albedo out of [0, 1]");
    if (diffuse_sh.max_order != kDiffuseOrder || specular_sh.max_order != kSpecularOrder)
        throw std::runtime_error("field sample: unexpected transfer orders");
    if (!(diffuse_sh.at(0, 0) > 0) || !(specular_sh.at(0, 0) > 0))
        throw std::runtime_error("field sample: 0th-degree transfer must be positive");
    for (double v : diffuse_sh.values)
        if (!std::isfinite(v)) throw std::runtime_error("field sample: non-finite diffuse transfer");
    for (double v : specular_sh.values)
        if (!std::isfinite(v)) throw std::runtime_error("field sample: non-finite specular transfer");
}

// -----------------------------------------------------------------------------
// VoxelShField
// -----------------------------------------------------------------------------

VoxelShField::VoxelShField(const Vec3& bounds_min, const Vec3& bounds_max, int nx, int ny, int nz)
    : bmin_(bounds_min),
      bmax_(bounds_max),
      nx_(nx),
      ny_(ny),
      nz_(nz),
      nd_((kDiffuseOrder + 1) * (kDiffuseOrder + 1)),
      ns_((kSpecularOrder + 1) * (kSpecularOrder + 1)) {
    if (nx < 2 || ny < 2 || nz < 2) throw std::invalid_argument("voxel field: dims must be >= 2");
    for (int a = 0; a < 3; a++)
        if (!(bmin_[a] < bmax_[a])) throw std::invalid_argument("voxel field: empty bounds");
    payload_.assign(size_t(voxel_count()) * values_per_voxel(), 0.f);
}

Vec3 VoxelShField::node_position(int i, int j, int k) const {
    return {bmin_.x + (bmax_.x - bmin_.x) * i / (nx_ - 1),
            bmin_.y + (bmax_.y - bmin_.y) * j / (ny_ - 1),
            bmin_.z + (bmax_.z - bmin_.z) * k / (nz_ - 1)};
}

FieldSample VoxelShField::voxel(int i, int j, int k) const {
    const float* p = voxel_data(i, j, k);
    FieldSample s;
    s.sigma = p[0];
    s.albedo = {p[1], p[2], p[3]};
    for (int n = 0; n < nd_; n++) s.diffuse_sh.values[n] = p[4 + n];
    for (int n = 0; n < ns_; n++) s.specular_sh.values[n] = p[4 + nd_ + n];
    return s;
}

void VoxelShField::set_voxel(int i, int j, int k, const FieldSample& sample) {
    float* p = voxel_data(i, j, k);
    p[0] = float(sample.sigma);
    p[1] = float(sample.albedo.r);
    p[2] = float(sample.albedo.g);
    p[3] = float(sample.albedo.b);
    for (int n = 0; n < nd_; n++) p[4 + n] = float(sample.diffuse_sh.values[n]);
    for (int n = 0; n < ns_; n++) p[4 + nd_ + n] = float(sample.specular_sh.values[n]);
}

FieldSample VoxelShField::query(const FieldQuery& q) const {
    FieldSample out;
    const Vec3& p = q.canonical_point;
    for (int a = 0; a < 3; a++)
        if (p[a] < bmin_[a] || p[a] > bmax_[a]) {
            // Outside the volume: vacuum, with valid (floor) transfer.
            out.diffuse_sh.at(0, 0) = 1e-6;
            out.specular_sh.at(0, 0) = 1e-6;
            return out;
        }

    double gx = (p.x - bmin_.x) / (bmax_.x - bmin_.x) * (nx_ - 1);
    double gy = (p.y - bmin_.y) / (bmax_.y - bmin_.y) * (ny_ - 1);
    double gz = (p.z - bmin_.z) / (bmax_.z - bmin_.z) * (nz_ - 1);
    int i0 = std::min(int(gx), nx_ - 2);
    int j0 = std::min(int(gy), ny_ - 2);
    int k0 = std::min(int(gz), nz_ - 2);
    double fx = gx - i0, fy = gy - j0, fz = gz - k0;

    int nvals = values_per_voxel();
    double acc[4 + 36 + 81] = {};
    for (int dk = 0; dk < 2; dk++)
        for (int dj = 0; dj < 2; dj++)
            for (int di = 0; di < 2; di++) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                if (w == 0) continue;
                const float* v = voxel_data(i0 + di, j0 + dj, k0 + dk);
                for (int n = 0; n < nvals; n++) acc[n] += w * v[n];
            }

    out.sigma = acc[0];
    out.albedo = {acc[1], acc[2], acc[3]};
    for (int n = 0; n < nd_; n++) out.diffuse_sh.values[n] = acc[4 + n];
    for (int n = 0; n < ns_; n++) out.specular_sh.values[n] = acc[4 + nd_ + n];
    if (!std::isfinite(out.sigma)) throw std::runtime_error("voxel field: non-finite payload");
    return out;
}

int VoxelShField::gather(const Vec3& p, int* indices, double* weights) const {
    for (int a = 0; a < 3; a++)
        if (p[a] < bmin_[a] || p[a] > bmax_[a]) return 0;
    double gx = (p.x - bmin_.x) / (bmax_.x - bmin_.x) * (nx_ - 1);
    double gy = (p.y - bmin_.y) / (bmax_.y - bmin_.y) * (ny_ - 1);
    double gz = (p.z - bmin_.z) / (bmax_.z - bmin_.z) * (nz_ - 1);
    int i0 = std::min(int(gx), nx_ - 2);
    int j0 = std::min(int(gy), ny_ - 2);
    int k0 = std::min(int(gz), nz_ - 2);
    double fx = gx - i0, fy = gy - j0, fz = gz - k0;
    int count = 0;
    for (int dk = 0; dk < 2; dk++)
        for (int dj = 0; dj < 2; dj++)
            for (int di = 0; di < 2; di++) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                if (w == 0) continue;
                indices[count] = index(i0 + di, j0 + dj, k0 + dk);
                weights[count] = w;
                count++;
            }
    return count;
}

void VoxelShField::enforce_constraints(double zeroth_floor) {
    int nvals = values_per_voxel();
    for (int v = 0; v < voxel_count(); v++) {
        float* p = &payload_[size_t(v) * nvals];
        p[0] = std::fmax(p[0], 0.f);
        for (int c = 1; c <= 3; c++) p[c] = float(clamp(p[c], 0.0, 1.0));
        p[4] = std::fmax(p[4], float(zeroth_floor));
        p[4 + nd_] = std::fmax(p[4 + nd_], float(zeroth_floor));
    }
    validate_payload();
}

void VoxelShField::validate_payload() const {
    for (float f : payload_)
        if (!std::isfinite(f)) throw std::runtime_error("voxel field: non-finite payload");
}

// -----------------------------------------------------------------------------
// EYNF binary format
// -----------------------------------------------------------------------------
// magic 'EYNF', version u32=1, dims 3*u32, bounds 6*f32, diffuse order u32,
// specular order u32, then per-voxel payload f32 x-fastest:
// sigma, albedo[3], diffuse coeffs, specular coeffs. Little-endian.

static_assert(sizeof(float) == 4);

void VoxelShField::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("eynf: cannot open for write: " + path);
    auto put_u32 = [&out](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f32 = [&out](float v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    out.write("EYNF", 4);
    put_u32(1);
    put_u32(uint32_t(nx_));
    put_u32(uint32_t(ny_));
    put_u32(uint32_t(nz_));
    for (int a = 0; a < 3; a++) put_f32(float(bmin_[a]));
    for (int a = 0; a < 3; a++) put_f32(float(bmax_[a]));
    put_u32(kDiffuseOrder);
    put_u32(kSpecularOrder);
    out.write(reinterpret_cast<const char*>(payload_.data()),
              std::streamsize(payload_.size() * sizeof(float)));
    if (!out) throw std::runtime_error("eynf: write failed: " + path);
}

VoxelShField VoxelShField::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("eynf: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EYNF", 4) != 0)
        throw std::runtime_error("eynf: bad magic in " + path);
    auto get_u32 = [&in]() {
        uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_f32 = [&in]() {
        float v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    uint32_t version = get_u32();
    if (version != 1) throw std::runtime_error("eynf: unsupported version in " + path);
    uint32_t nx = get_u32(), ny = get_u32(), nz = get_u32();
    Vec3 bmin{get_f32(), get_f32(), get_f32()};
    Vec3 bmax{get_f32(), get_f32(), get_f32()};
    uint32_t dorder = get_u32(), sorder = get_u32();
    if (dorder != kDiffuseOrder || sorder != kSpecularOrder)
        throw std::runtime_error("eynf: unsupported transfer orders in " + path);
    VoxelShField field(bmin, bmax, int(nx), int(ny), int(nz));
    in.read(reinterpret_cast<char*>(field.payload_.data()),
            std::streamsize(field.payload_.size() * sizeof(float)));
    if (!in) throw std::runtime_error("eynf: truncated payload in " + path);
    field.validate_payload();
    return field;
}

std::shared_ptr<RadianceField> make_named_field(const std::string& name) {
    if (name == "vacuum") {
        return std::make_shared<AnalyticField>([](const FieldQuery&) {
            FieldSample s;
            s.diffuse_sh.at(0, 0) = 1e-6;
            s.specular_sh.at(0, 0) = 1e-6;
            return s;
        });
    }
    if (name == "debug-sphere") {
        // 8 mm radius diffuse ball at the canonical origin; handy smoke-test field.
        return std::make_shared<AnalyticField>([](const FieldQuery& q) {
            FieldSample s;
            s.diffuse_sh.at(0, 0) = 1.0;
            s.specular_sh.at(0, 0) = 1e-6;
            if (norm(q.canonical_point) < 8.0) {
                s.sigma = 0.5;
                s.albedo = {0.8, 0.6, 0.5};
            }
            return s;
        });
    }
    throw std::runtime_error("unknown analytic field: " + name);
}

}  // namespace eyevol

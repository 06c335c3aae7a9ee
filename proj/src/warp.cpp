// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include "eyevol/warp.h"

#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace eyevol {

Vec3 warp_point(const WarpField& warp, int frame, const Vec3& world_point) {
    if (!warp.has_frame(frame))
        throw std::invalid_argument("warp: unknown frame " + std::to_string(frame));
    return warp.warp(frame, world_point);
}

Vec3 RigidWarp::warp(int frame, const Vec3& p) const {
    auto it = frames_.find(frame);
    if (it == frames_.end())
        throw std::invalid_argument("warp: unknown frame " + std::to_string(frame));
    return it->second.apply(p);
}

LatticeWarp::LatticeWarp(const Vec3& bounds_min, const Vec3& bounds_max, int nx, int ny, int nz)
    : bmin_(bounds_min), bmax_(bounds_max), nx_(nx), ny_(ny), nz_(nz) {
    if (nx < 2 || ny < 2 || nz < 2) throw std::invalid_argument("lattice warp: dims must be >= 2");
    for (int a = 0; a < 3; a++)
        if (!(bmin_[a] < bmax_[a])) throw std::invalid_argument("lattice warp: empty bounds");
}

Vec3 LatticeWarp::node_position(int i, int j, int k) const {
    return {bmin_.x + (bmax_.x - bmin_.x) * i / (nx_ - 1),
            bmin_.y + (bmax_.y - bmin_.y) * j / (ny_ - 1),
            bmin_.z + (bmax_.z - bmin_.z) * k / (nz_ - 1)};
}

void LatticeWarp::set_displacement(int frame, int i, int j, int k, const Vec3& disp) {
    auto& grid = frames_[frame];
    if (grid.empty()) grid.assign(size_t(3) * nx_ * ny_ * nz_, 0.f);
    float* p = &grid[size_t(3) * index(i, j, k)];
    p[0] = float(disp.x);
    p[1] = float(disp.y);
    p[2] = float(disp.z);
}

void LatticeWarp::set_frame_from_function(int frame,
                                          const std::function<Vec3(const Vec3&)>& displacement) {
    for (int k = 0; k < nz_; k++)
        for (int j = 0; j < ny_; j++)
            for (int i = 0; i < nx_; i++)
                set_displacement(frame, i, j, k, displacement(node_position(i, j, k)));
}

Vec3 LatticeWarp::warp(int frame, const Vec3& p) const {
    auto it = frames_.find(frame);
    if (it == frames_.end())
        throw std::invalid_argument("warp: unknown frame " + std::to_string(frame));
    const std::vector<float>& grid = it->second;

    double gx = clamp((p.x - bmin_.x) / (bmax_.x - bmin_.x), 0.0, 1.0) * (nx_ - 1);
    double gy = clamp((p.y - bmin_.y) / (bmax_.y - bmin_.y), 0.0, 1.0) * (ny_ - 1);
    double gz = clamp((p.z - bmin_.z) / (bmax_.z - bmin_.z), 0.0, 1.0) * (nz_ - 1);
    int i0 = std::min(int(gx), nx_ - 2);
    int j0 = std::min(int(gy), ny_ - 2);
    int k0 = std::min(int(gz), nz_ - 2);
    double fx = gx - i0, fy = gy - j0, fz = gz - k0;

    Vec3 disp;
    for (int dk = 0; dk < 2; dk++)
        for (int dj = 0; dj < 2; dj++)
            for (int di = 0; di < 2; di++) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                if (w == 0) continue;
                const float* d = &grid[size_t(3) * index(i0 + di, j0 + dj, k0 + dk)];
                disp += Vec3{d[0], d[1], d[2]} * w;
            }
    return p + disp;
}

// EYWP binary: magic, version u32=1, dims 3*u32, bounds 6*f32, frame count
// u32, then per frame: id u32 + 3*f32 per node (x-fastest).
void LatticeWarp::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("eywp: cannot open for write: " + path);
    auto put_u32 = [&out](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f32 = [&out](float v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    out.write("EYWP", 4);
    put_u32(1);
    put_u32(uint32_t(nx_));
    put_u32(uint32_t(ny_));
    put_u32(uint32_t(nz_));
    for (int a = 0; a < 3; a++) put_f32(float(bmin_[a]));
    for (int a = 0; a < 3; a++) put_f32(float(bmax_[a]));
    put_u32(uint32_t(frames_.size()));
    for (const auto& [id, grid] : frames_) {
        put_u32(uint32_t(id));
        out.write(reinterpret_cast<const char*>(grid.data()),
                  std::streamsize(grid.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("eywp: write failed: " + path);
}

LatticeWarp LatticeWarp::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("eywp: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EYWP", 4) != 0)
        throw std::runtime_error("eywp: bad magic in " + path);
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
    if (get_u32() != 1) throw std::runtime_error("eywp: unsupported version in " + path);
    uint32_t nx = get_u32(), ny = get_u32(), nz = get_u32();
    Vec3 bmin{get_f32(), get_f32(), get_f32()};
    Vec3 bmax{get_f32(), get_f32(), get_f32()};
    LatticeWarp warp(bmin, bmax, int(nx), int(ny), int(nz));
    uint32_t nframes = get_u32();
    for (uint32_t f = 0; f < nframes; f++) {
        uint32_t id = get_u32();
        std::vector<float> grid(size_t(3) * nx * ny * nz);
        in.read(reinterpret_cast<char*>(grid.data()), std::streamsize(grid.size() * sizeof(float)));
        warp.frames_[int(id)] = std::move(grid);
    }
    if (!in) throw std::runtime_error("eywp: truncated file: " + path);
    return warp;
}

Vec3 eye_interior_transform(const EyePose& pose, const Vec3& world_point,
                            const Vec3& interior_offset) {
    return pose.apply_inverse(world_point) + interior_offset;
}

}  // namespace eyevol

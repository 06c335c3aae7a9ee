// eyevol is Copyright(c) 2026 the eyevol authors.
// The eyevol source code is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#ifndef EYEVOL_RENDER_H
#define EYEVOL_RENDER_H

#include <functional>
#include <optional>
#include <vector>

#include "eyevol/bvh.h"
#include "eyevol/camera.h"
#include "eyevol/field.h"
#include "eyevol/image.h"
#include "eyevol/lighting.h"
#include "eyevol/optics.h"
#include "eyevol/ray.h"
#include "eyevol/rng.h"
#include "eyevol/warp.h"

namespace eyevol {

struct SamplingConfig {
    int n_coarse = 64;
    int n_fine = 64;
    bool jitter = true;
};

struct RenderConfig {
    SamplingConfig sampling;
    uint64_t seed = 1;
    double ior = kCorneaIor;
    bool sclera_ior_zero = false;
    bool shadow_branch_enabled = true;
    Vec3 interior_offset = kDefaultInteriorOffset;
    double clip_half_width = 100.0;  // mm on either side of the eyeball center
    int threads = 0;                 // 0 = hardware concurrency
};

// Everything tied to one rendered frame: the posed eye, the field, and the
// world->canonical warp for periocular samples.
struct FrameGeometry {
    const Bvh* bvh = nullptr;  // may be null (no eye surface)
    const RadianceField* field = nullptr;
    std::function<Vec3(const Vec3&)> periocular_warp;  // identity if empty
    EyePose pose;
    Vec3 eye_center;  // posed eyeball center, for the clipping planes
};

// Ordered samples along one ray plus the terminal sample's fixed color.
struct RaySampleSet {
    std::vector<double> t;      // sorted
    std::vector<double> delta;  // > 0, last one extends to the segment end
    std::vector<double> sigma;
    std::vector<Rgb> color;
    Rgb terminal_color{0, 0, 0};

    size_t size() const { return t.size(); }
};

// Stratified-equidistant coarse positions over [t_near, t_far]; when
// coarse_weights is given (one weight per coarse stratum), n_fine additional
// positions are drawn by inverse-CDF over the stratum histogram and the
// merged sorted set is returned. Both calls with the same seed share the
// coarse positions.
std::vector<double> sample_ray(const Ray& ray, int n_coarse, int n_fine,
                               const std::vector<double>* coarse_weights, uint64_t seed,
                               bool jitter = true);

// Diffuse radiance times albedo plus specular radiance, each clamped to be
// nonnegative before use.
Rgb shade_sample(const FieldSample& fs, const LightingContext& ctx);

// alpha_i = exp(-sigma_i delta_i), T_t = prod alpha_i,
// C = sum T_t (1 - alpha_t) c_t, terminal included with alpha = 0.
Rgb accumulate(const RaySampleSet& samples);

// Contribution weights T_t (1 - alpha_t) per sample (terminal excluded);
// used as the coarse importance histogram.
std::vector<double> contribution_weights(const RaySampleSet& samples);

// Per-sample decomposition of a full merged-ray render. Contribution weights
// depend only on opacities, segment lengths, and the Fresnel factor, so for a
// fixed field the pixel radiance is
//   sum_i weight_i * shade_sample(fs_i, ctx)
//     + reflected_terminal_weight * ctx.terminal_radiance(reflected_dir).
// The reflected ray is rendered behind the last pre-intersect sample with
// Fresnel-weighted alpha compositing; pre-intersect and refracted terminals
// are black.
struct RayContribution {
    struct Sample {
        FieldSample fs;
        Vec3 world;
        Vec3 canonical;
        Vec3 view_dir;
        double weight;
    };
    std::vector<Sample> samples;
    double reflected_terminal_weight = 0;
    Vec3 reflected_dir{0, 0, 1};
};

RayContribution trace_ray_contribution(const SplitRays& split, const FrameGeometry& geom,
                                       const RenderConfig& cfg, uint64_t pixel_seed);

// Full merged-ray rendering over a cornea split: the reflected ray is
// rendered on its own with an environment terminal, folded into the last
// pre-intersect sample by Fresnel-weighted compositing, and the combined
// pre-intersect + refracted ray is accumulated with a black terminal.
Rgb render_ray(const SplitRays& split, const FrameGeometry& geom, const LightingContext& ctx,
               const RenderConfig& cfg, uint64_t pixel_seed);

// The clip range used for a pixel ray: eyeball center +- clip_half_width
// projected onto the ray.
void apply_clip_range(Ray& ray, const Vec3& eye_center, double clip_half_width);

// Deterministic given cfg.seed, independent of cfg.threads.
Image3f render_image(const Camera& camera, const FrameGeometry& geom, const LightingContext& ctx,
                     const RenderConfig& cfg);

}  // namespace eyevol

#endif
